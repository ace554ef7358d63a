//! Index sets: compositions, object labels, set partitions, interpolated
//! double-coset matrices, and enumeration of arrays with prescribed margins.

use std::fmt;

use crate::error::{input, Error, Result};
use crate::exact::AffineForm;

/// Finite sequence of nonnegative integers, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Composition(Vec<i64>);

impl Composition {
    pub fn new(mut parts: Vec<i64>) -> Result<Self> {
        if parts.iter().any(|&p| p < 0) {
            return input(format!("negative part in composition {parts:?}"));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Composition(parts))
    }

    pub fn parts(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn get(&self, i: usize) -> i64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_partition(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Composition::default());
        }
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Input(format!("bad composition {s:?}")))?;
        Composition::new(parts)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

/// `true` iff every prefix sum of `mu` is at most the matching prefix sum of `nu`.
pub fn dominance_leq(mu: &Composition, nu: &Composition) -> Result<bool> {
    if !mu.is_partition() || !nu.is_partition() {
        return input("dominance order is only defined on partitions");
    }
    if mu.size() != nu.size() {
        return input("dominance order compares partitions of the same size");
    }
    let n = mu.len().max(nu.len());
    let (mut a, mut b) = (0, 0);
    for i in 0..n {
        a += mu.get(i);
        b += nu.get(i);
        if a > b {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Partitions of `n` in decreasing lexicographic order.
pub fn partitions(n: i64) -> Vec<Composition> {
    fn go(n: i64, max: i64, cur: &mut Vec<i64>, out: &mut Vec<Composition>) {
        if n == 0 {
            out.push(Composition(cur.clone()));
            return;
        }
        for p in (1..=n.min(max)).rev() {
            cur.push(p);
            go(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// A label `(λ + σ, τ)`: `l` symbolic entries followed by a concrete tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectLabel {
    l: usize,
    sigma: Vec<i64>,
    tau: Composition,
}

impl ObjectLabel {
    /// With empty `sigma` this is [`concrete`](Self::concrete).
    pub fn new(sigma: Vec<i64>, tau: Composition) -> Result<Self> {
        if !sigma.is_empty() && sigma.iter().sum::<i64>() + tau.size() != 0 {
            return input("offsets and tail must sum to zero");
        }
        Ok(ObjectLabel { l: sigma.len(), sigma, tau })
    }

    /// Purely concrete label (`l = 0`), i.e. an honest composition.
    pub fn concrete(c: Composition) -> Self {
        ObjectLabel { l: 0, sigma: Vec::new(), tau: c }
    }

    /// The label `(λ_1, ..., λ_l)`.
    pub fn generic(l: usize) -> Self {
        ObjectLabel { l, sigma: vec![0; l], tau: Composition::default() }
    }

    /// Build from entries; the first `l` must be `λ_i + c`, the rest concrete.
    pub fn from_entries(l: usize, entries: &[AffineForm]) -> Result<Self> {
        if entries.len() < l {
            return input("label shorter than its parameter length");
        }
        let mut sigma = Vec::with_capacity(l);
        for (i, e) in entries[..l].iter().enumerate() {
            if e.var != Some(i) {
                return input(format!("entry {} should be symbolic in L{}", i + 1, i + 1));
            }
            sigma.push(e.offset);
        }
        let mut tail = Vec::new();
        for e in &entries[l..] {
            if e.is_symbolic() {
                return input("symbolic entry in concrete tail");
            }
            tail.push(e.offset);
        }
        ObjectLabel::new(sigma, Composition::new(tail)?)
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn sigma(&self) -> &[i64] {
        &self.sigma
    }

    pub fn tau(&self) -> &Composition {
        &self.tau
    }

    pub fn len(&self) -> usize {
        self.l + self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entry(&self, i: usize) -> AffineForm {
        if i < self.l {
            AffineForm::var(i, self.sigma[i])
        } else {
            AffineForm::constant(self.tau.get(i - self.l))
        }
    }

    pub fn entries(&self) -> Vec<AffineForm> {
        (0..self.len()).map(|i| self.entry(i)).collect()
    }

    /// Image under `λ ↦ μ`; `None` is the zero object.
    pub fn specialize(&self, mu: &[i64]) -> Result<Option<Composition>> {
        if mu.len() != self.l {
            return input("specialization point has the wrong length");
        }
        let parts: Vec<i64> = self.entries().iter().map(|e| e.eval(mu)).collect();
        if parts.iter().any(|&p| p < 0) {
            return Ok(None);
        }
        Composition::new(parts).map(Some)
    }

    pub fn parse(l: usize, s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let entries = if s.trim().is_empty() {
            Vec::new()
        } else {
            s.split(',').map(AffineForm::parse).collect::<Result<Vec<_>>>()?
        };
        Self::from_entries(l, &entries)
    }

    /// Like [`parse`](Self::parse) but reads `l` from the leading symbolic entries.
    pub fn parse_auto(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let l = inner
            .split(',')
            .take_while(|e| e.trim().starts_with('L'))
            .count();
        Self::parse(l, s)
    }
}

impl fmt::Display for ObjectLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.entries().iter().map(|e| e.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Set partition of `{0..n}` with blocks sorted internally and by minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut canon = Vec::with_capacity(blocks.len());
        for mut b in blocks {
            if b.is_empty() {
                return input("empty block");
            }
            b.sort_unstable();
            for &x in &b {
                if x >= n || seen[x] {
                    return input(format!("element {x} repeated or out of range"));
                }
                seen[x] = true;
            }
            canon.push(b);
        }
        if seen.iter().any(|s| !s) {
            return input("blocks do not cover the ground set");
        }
        canon.sort_by_key(|b| b[0]);
        Ok(SetPartition { n, blocks: canon })
    }

    /// Canonical partition from a block label per element.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut order: Vec<usize> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (x, &lab) in labels.iter().enumerate() {
            match order.iter().position(|&o| o == lab) {
                Some(i) => blocks[i].push(x),
                None => {
                    order.push(lab);
                    blocks.push(vec![x]);
                }
            }
        }
        SetPartition { n: labels.len(), blocks }
    }

    pub fn discrete(n: usize) -> Self {
        SetPartition { n, blocks: (0..n).map(|x| vec![x]).collect() }
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Block index of each element.
    pub fn labels(&self) -> Vec<usize> {
        let mut lab = vec![0; self.n];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                lab[x] = i;
            }
        }
        lab
    }

    /// Every partition whose blocks are unions of blocks of `self`.
    pub fn coarsenings(&self) -> Vec<SetPartition> {
        let lab = self.labels();
        all_set_partitions(self.blocks.len())
            .into_iter()
            .map(|merge| {
                let ml = merge.labels();
                SetPartition::from_labels(&lab.iter().map(|&b| ml[b]).collect::<Vec<_>>())
            })
            .collect()
    }

    /// `true` iff `self` is a coarsening of `finer`.
    pub fn is_coarsening_of(&self, finer: &SetPartition) -> bool {
        let mine = self.labels();
        finer
            .blocks
            .iter()
            .all(|b| b.iter().all(|&x| mine[x] == mine[b[0]]))
    }
}

/// All set partitions of `{0..n}` via restricted growth strings.
pub fn all_set_partitions(n: usize) -> Vec<SetPartition> {
    fn go(k: usize, n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<SetPartition>) {
        if k == n {
            out.push(SetPartition::from_labels(cur));
            return;
        }
        for v in 0..=max {
            cur.push(v);
            go(k + 1, n, max.max(v + 1), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, 0, &mut Vec::new(), &mut out);
    out
}

/// Interpolated double-coset matrix: rows index the codomain, columns the
/// domain; the first `l` diagonal cells hold `λ_i + offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetMatrix {
    l: usize,
    rows: usize,
    cols: usize,
    /// Row-major; symbolic diagonal slots store their offset.
    cells: Vec<i64>,
}

impl CosetMatrix {
    /// From a grid of affine forms (symbolic exactly on the first `l` diagonal slots).
    pub fn from_grid(l: usize, rows: usize, cols: usize, grid: &[AffineForm]) -> Result<Self> {
        if grid.len() != rows * cols || rows < l || cols < l {
            return input("grid shape does not match");
        }
        let mut cells = Vec::with_capacity(grid.len());
        for i in 0..rows {
            for k in 0..cols {
                let e = grid[i * cols + k];
                if i == k && i < l {
                    if e.var != Some(i) {
                        return input(format!("diagonal slot {} must be symbolic", i + 1));
                    }
                } else if e.is_symbolic() || e.offset < 0 {
                    return input(format!("entry ({},{}) must be a nonnegative integer", i + 1, k + 1));
                }
                cells.push(e.offset);
            }
        }
        Ok(CosetMatrix { l, rows, cols, cells }.trimmed())
    }

    pub fn from_parts(
        l: usize,
        rows: usize,
        cols: usize,
        diag_offsets: &[i64],
        entries: &[i64],
    ) -> Result<Self> {
        if diag_offsets.len() != l || entries.len() != rows * cols {
            return input("matrix field lengths do not match");
        }
        let grid: Vec<AffineForm> = (0..rows * cols)
            .map(|idx| {
                let (i, k) = (idx / cols, idx % cols);
                if i == k && i < l {
                    AffineForm::var(i, diag_offsets[i])
                } else {
                    AffineForm::constant(entries[idx])
                }
            })
            .collect();
        Self::from_grid(l, rows, cols, &grid)
    }

    /// Concrete integer matrix (`l = 0`).
    pub fn concrete(m: &[Vec<i64>]) -> Result<Self> {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        if m.iter().any(|r| r.len() != cols) {
            return input("ragged matrix");
        }
        let grid: Vec<AffineForm> = m.iter().flatten().map(|&v| AffineForm::constant(v)).collect();
        Self::from_grid(0, rows, cols, &grid)
    }

    /// Diagonal matrix of an object (the identity morphism's key).
    pub fn identity(alpha: &ObjectLabel) -> Self {
        let n = alpha.len();
        let mut grid = vec![AffineForm::constant(0); n * n];
        for i in 0..n {
            grid[i * n + i] = alpha.entry(i);
        }
        Self::from_grid(alpha.l(), n, n, &grid).expect("identity is well formed")
    }

    fn trimmed(mut self) -> Self {
        while self.rows > self.l && (0..self.cols).all(|k| self.cells[(self.rows - 1) * self.cols + k] == 0) {
            self.rows -= 1;
            self.cells.truncate(self.rows * self.cols);
        }
        while self.cols > self.l && (0..self.rows).all(|i| self.cells[i * self.cols + self.cols - 1] == 0) {
            let c = self.cols;
            self.cells = self
                .cells
                .chunks(c)
                .flat_map(|row| row[..c - 1].iter().copied())
                .collect();
            self.cols -= 1;
        }
        self
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_symbolic_slot(&self, i: usize, k: usize) -> bool {
        i == k && i < self.l
    }

    /// Entry with zero padding outside the stored shape.
    pub fn entry(&self, i: usize, k: usize) -> AffineForm {
        if self.is_symbolic_slot(i, k) {
            return AffineForm::var(i, self.cells[i * self.cols + k]);
        }
        if i >= self.rows || k >= self.cols {
            return AffineForm::constant(0);
        }
        AffineForm::constant(self.cells[i * self.cols + k])
    }

    pub fn diag_offsets(&self) -> Vec<i64> {
        (0..self.l).map(|i| self.cells[i * self.cols + i]).collect()
    }

    /// Row-major entries with the symbolic diagonal slots reported as 0.
    pub fn concrete_entries(&self) -> Vec<i64> {
        (0..self.rows * self.cols)
            .map(|idx| {
                let (i, k) = (idx / self.cols, idx % self.cols);
                if self.is_symbolic_slot(i, k) {
                    0
                } else {
                    self.cells[idx]
                }
            })
            .collect()
    }

    pub fn grid(&self) -> Vec<AffineForm> {
        (0..self.rows * self.cols)
            .map(|idx| self.entry(idx / self.cols, idx % self.cols))
            .collect()
    }

    fn line_sum(&self, it: impl Iterator<Item = AffineForm>) -> AffineForm {
        it.fold(AffineForm::constant(0), |acc, e| AffineForm {
            var: acc.var.or(e.var),
            offset: acc.offset + e.offset,
        })
    }

    pub fn row_sums(&self) -> Vec<AffineForm> {
        (0..self.rows)
            .map(|i| self.line_sum((0..self.cols).map(|k| self.entry(i, k))))
            .collect()
    }

    pub fn col_sums(&self) -> Vec<AffineForm> {
        (0..self.cols)
            .map(|k| self.line_sum((0..self.rows).map(|i| self.entry(i, k))))
            .collect()
    }

    pub fn codomain(&self) -> Result<ObjectLabel> {
        ObjectLabel::from_entries(self.l, &self.row_sums())
    }

    pub fn domain(&self) -> Result<ObjectLabel> {
        ObjectLabel::from_entries(self.l, &self.col_sums())
    }

    /// Sum of the entries off the diagonal.
    pub fn offdiag_degree(&self) -> i64 {
        let mut d = 0;
        for i in 0..self.rows {
            for k in 0..self.cols {
                if i != k {
                    d += self.cells[i * self.cols + k];
                }
            }
        }
        d
    }

    pub fn transpose(&self) -> Self {
        let mut cells = vec![0; self.cells.len()];
        for i in 0..self.rows {
            for k in 0..self.cols {
                cells[k * self.rows + i] = self.cells[i * self.cols + k];
            }
        }
        CosetMatrix { l: self.l, rows: self.cols, cols: self.rows, cells }
    }

    /// Integer matrix at `λ = μ`, or `None` if some entry is negative.
    pub fn specialize(&self, mu: &[i64]) -> Option<Vec<Vec<i64>>> {
        let m: Vec<Vec<i64>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|k| self.entry(i, k).eval(mu)).collect())
            .collect();
        m.iter().flatten().all(|&v| v >= 0).then_some(m)
    }

    /// Text form: rows separated by `;`, entries by `,`, e.g. `L1-1,1;1,L2-1`.
    pub fn parse(s: &str) -> Result<Self> {
        let rows: Vec<Vec<AffineForm>> = s
            .split(';')
            .map(|r| r.split(',').map(AffineForm::parse).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let nr = rows.len();
        let nc = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != nc) {
            return input("ragged matrix");
        }
        let l = (0..nr.min(nc)).take_while(|&i| rows[i][i].is_symbolic()).count();
        let grid: Vec<AffineForm> = rows.into_iter().flatten().collect();
        Self::from_grid(l, nr, nc, &grid)
    }
}

impl fmt::Display for CosetMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|k| self.entry(i, k).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        f.write_str(&rows.join(";"))
    }
}

/// Right-hand side of a linear margin constraint: `constant + Σ coeffs[v]·λ_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinTarget {
    pub coeffs: Vec<i64>,
    pub constant: i64,
}

impl LinTarget {
    pub fn from_affine(nvars: usize, a: &AffineForm) -> Self {
        let mut coeffs = vec![0; nvars];
        if let Some(v) = a.var {
            coeffs[v] = 1;
        }
        LinTarget { coeffs, constant: a.offset }
    }

    fn is_concrete(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Nonnegative integer arrays (flattened to cells) subject to linear
/// margin constraints.  Symbolic cells take values `λ_v + c` and are solved
/// from the constraints once the concrete cells are fixed.
#[derive(Clone, Debug)]
pub struct MarginSystem {
    nvars: usize,
    cell_vars: Vec<Option<usize>>,
    constraints: Vec<(Vec<usize>, LinTarget)>,
    budget: Option<(Vec<usize>, i64)>,
}

impl MarginSystem {
    pub fn new(nvars: usize, cell_vars: Vec<Option<usize>>) -> Self {
        MarginSystem { nvars, cell_vars, constraints: Vec::new(), budget: None }
    }

    pub fn constrain(&mut self, cells: Vec<usize>, target: LinTarget) {
        self.constraints.push((cells, target));
    }

    pub fn constrain_affine(&mut self, cells: Vec<usize>, target: &AffineForm) {
        let t = LinTarget::from_affine(self.nvars, target);
        self.constrain(cells, t);
    }

    /// Bound the total of the given (concrete) cells.
    pub fn budget(&mut self, cells: Vec<usize>, bound: i64) {
        self.budget = Some((cells, bound));
    }

    /// All solutions, in lexicographic order of the concrete cells.
    pub fn solve(&self) -> Result<Vec<Vec<AffineForm>>> {
        let mut out = Vec::new();
        self.for_each(|s| out.push(s.to_vec()))?;
        Ok(out)
    }

    pub fn for_each(&self, mut f: impl FnMut(&[AffineForm])) -> Result<()> {
        let n = self.cell_vars.len();
        let free: Vec<usize> = (0..n).filter(|&c| self.cell_vars[c].is_none()).collect();
        // Constraints whose cells and target are all concrete bound their cells.
        let concrete: Vec<usize> = (0..self.constraints.len())
            .filter(|&i| {
                let (cells, t) = &self.constraints[i];
                t.is_concrete() && cells.iter().all(|&c| self.cell_vars[c].is_none())
            })
            .collect();
        let mut bounding: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (ci, &k) in concrete.iter().enumerate() {
            for &c in &self.constraints[k].0 {
                bounding[c].push(ci);
            }
        }
        let mut in_budget = vec![false; n];
        if let Some((cells, _)) = &self.budget {
            for &c in cells {
                in_budget[c] = true;
            }
        }
        for &c in &free {
            if bounding[c].is_empty() && !in_budget[c] {
                return input(format!("cell {c} is not bounded by any concrete margin"));
            }
        }
        let pos: Vec<usize> = {
            let mut p = vec![usize::MAX; n];
            for (i, &c) in free.iter().enumerate() {
                p[c] = i;
            }
            p
        };
        // Position of the last free cell of each concrete constraint: its value is forced.
        let last: Vec<usize> = concrete
            .iter()
            .map(|&k| self.constraints[k].0.iter().map(|&c| pos[c]).max().unwrap_or(0))
            .collect();
        let mut forced_at: Vec<Vec<usize>> = vec![Vec::new(); free.len()];
        for (ci, &p) in last.iter().enumerate() {
            if !self.constraints[concrete[ci]].0.is_empty() {
                forced_at[p].push(ci);
            }
        }
        if concrete
            .iter()
            .any(|&k| self.constraints[k].0.is_empty() && self.constraints[k].1.constant != 0)
        {
            return Ok(());
        }
        let mut state = Search {
            sys: self,
            free: &free,
            bounding: &bounding,
            in_budget: &in_budget,
            forced_at: &forced_at,
            remaining: concrete.iter().map(|&k| self.constraints[k].1.constant).collect(),
            budget_left: self.budget.as_ref().map_or(i64::MAX, |b| b.1),
            values: vec![AffineForm::constant(0); n],
        };
        state.go(0, &mut f);
        Ok(())
    }

    fn finish(&self, values: &mut [AffineForm]) -> bool {
        let n = values.len();
        let mut known: Vec<bool> = self.cell_vars.iter().map(Option::is_none).collect();
        let mut progress = true;
        while progress {
            progress = false;
            for (cells, t) in &self.constraints {
                let unknown: Vec<usize> = cells.iter().copied().filter(|&c| !known[c]).collect();
                if unknown.len() != 1 {
                    continue;
                }
                let u = unknown[0];
                let v = self.cell_vars[u].unwrap();
                let mut coeffs = t.coeffs.clone();
                let mut constant = t.constant;
                for &c in cells {
                    if c != u {
                        if let Some(w) = values[c].var {
                            coeffs[w] -= 1;
                        }
                        constant -= values[c].offset;
                    }
                }
                let unit = coeffs.iter().enumerate().all(|(w, &x)| x == i64::from(w == v));
                if !unit {
                    return false;
                }
                values[u] = AffineForm::var(v, constant);
                known[u] = true;
                progress = true;
            }
        }
        if (0..n).any(|c| !known[c]) {
            return false;
        }
        self.constraints.iter().all(|(cells, t)| {
            let mut coeffs = vec![0; self.nvars];
            let mut constant = 0;
            for &c in cells {
                if let Some(w) = values[c].var {
                    coeffs[w] += 1;
                }
                constant += values[c].offset;
            }
            coeffs == t.coeffs && constant == t.constant
        })
    }
}

struct Search<'a> {
    sys: &'a MarginSystem,
    free: &'a [usize],
    bounding: &'a [Vec<usize>],
    in_budget: &'a [bool],
    forced_at: &'a [Vec<usize>],
    remaining: Vec<i64>,
    budget_left: i64,
    values: Vec<AffineForm>,
}

impl Search<'_> {
    fn go(&mut self, idx: usize, f: &mut impl FnMut(&[AffineForm])) {
        if idx == self.free.len() {
            let mut vals = self.values.clone();
            if self.sys.finish(&mut vals) {
                f(&vals);
            }
            return;
        }
        let c = self.free[idx];
        let mut hi = if self.in_budget[c] { self.budget_left } else { i64::MAX };
        for &ci in &self.bounding[c] {
            hi = hi.min(self.remaining[ci]);
        }
        let mut lo = 0;
        for &ci in &self.forced_at[idx] {
            let need = self.remaining[ci];
            lo = lo.max(need);
            hi = hi.min(need);
        }
        if lo > hi {
            return;
        }
        for v in lo..=hi {
            for &ci in &self.bounding[c] {
                self.remaining[ci] -= v;
            }
            if self.in_budget[c] {
                self.budget_left -= v;
            }
            self.values[c] = AffineForm::constant(v);
            self.go(idx + 1, f);
            for &ci in &self.bounding[c] {
                self.remaining[ci] += v;
            }
            if self.in_budget[c] {
                self.budget_left += v;
            }
        }
    }
}

/// Nonnegative integer matrices with the given row and column sums.
pub fn enumerate_marginal_matrices(rows: &Composition, cols: &Composition) -> Vec<Vec<Vec<i64>>> {
    if rows.size() != cols.size() {
        return Vec::new();
    }
    let (nr, nc) = (rows.len(), cols.len());
    let mut sys = MarginSystem::new(0, vec![None; nr * nc]);
    for i in 0..nr {
        sys.constrain_affine((0..nc).map(|k| i * nc + k).collect(), &AffineForm::constant(rows.get(i)));
    }
    for k in 0..nc {
        sys.constrain_affine((0..nr).map(|i| i * nc + k).collect(), &AffineForm::constant(cols.get(k)));
    }
    sys.solve()
        .expect("concrete margins bound every cell")
        .into_iter()
        .map(|v| v.chunks(nc.max(1)).map(|r| r.iter().map(|e| e.offset).collect()).collect())
        .collect()
}

/// Elements of `T_λ(domain, codomain)` with off-diagonal sum at most `max_offdiag`.
pub fn enumerate_symbolic_matrices(
    domain: &ObjectLabel,
    codomain: &ObjectLabel,
    max_offdiag: i64,
) -> Result<Vec<CosetMatrix>> {
    if domain.l() != codomain.l() {
        return input("labels live over different parameter lengths");
    }
    let l = domain.l();
    let (nr, nc) = (codomain.len(), domain.len());
    let cell_vars: Vec<Option<usize>> = (0..nr * nc)
        .map(|idx| {
            let (i, k) = (idx / nc, idx % nc);
            (i == k && i < l).then_some(i)
        })
        .collect();
    let mut sys = MarginSystem::new(l, cell_vars);
    for i in 0..nr {
        sys.constrain_affine((0..nc).map(|k| i * nc + k).collect(), &codomain.entry(i));
    }
    for k in 0..nc {
        sys.constrain_affine((0..nr).map(|i| i * nc + k).collect(), &domain.entry(k));
    }
    sys.budget(
        (0..nr * nc).filter(|idx| idx / nc != idx % nc).collect(),
        max_offdiag,
    );
    sys.solve()?
        .into_iter()
        .map(|g| CosetMatrix::from_grid(l, nr, nc, &g))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn comp(p: &[i64]) -> Composition {
        Composition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn compositions_trim_trailing_zeros_only() {
        assert_eq!(comp(&[2, 0, 1, 0, 0]).parts(), &[2, 0, 1]);
        assert!(Composition::new(vec![1, -1]).is_err());
    }

    #[test]
    fn marginal_matrices() {
        assert_eq!(enumerate_marginal_matrices(&comp(&[1, 1]), &comp(&[1, 1])).len(), 2);
        let ms = enumerate_marginal_matrices(&comp(&[1, 3, 2]), &comp(&[4, 2]));
        assert!(ms.contains(&vec![vec![1, 0], vec![2, 1], vec![1, 1]]));
        assert!(enumerate_marginal_matrices(&comp(&[2]), &comp(&[1])).is_empty());
        // Brute force over 2x2 grids with entries at most 2.
        let ms = enumerate_marginal_matrices(&comp(&[2, 1]), &comp(&[2, 1]));
        let mut brute = 0;
        for a in 0..=2 {
            for b in 0..=2 {
                for c in 0..=2 {
                    for d in 0..=2 {
                        if a + b == 2 && c + d == 1 && a + c == 2 && b + d == 1 {
                            brute += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(ms.len(), brute);
        assert_eq!(ms.len(), 2);
    }

    #[test]
    fn symbolic_matrices() {
        let a = ObjectLabel::generic(2);
        let ms = enumerate_symbolic_matrices(&a, &a, 2).unwrap();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0], CosetMatrix::identity(&a));
        assert_eq!(ms[1], CosetMatrix::parse("L1-1,1;1,L2-1").unwrap());
        let ms = enumerate_symbolic_matrices(&a, &a, 0).unwrap();
        assert_eq!(ms, vec![CosetMatrix::identity(&a)]);
        let b = ObjectLabel::new(vec![1, -1], Composition::default()).unwrap();
        let ms = enumerate_symbolic_matrices(&a, &b, 1).unwrap();
        assert_eq!(ms, vec![CosetMatrix::parse("L1,1;0,L2-1").unwrap()]);
        for m in &ms {
            assert_eq!(m.domain().unwrap(), a);
            assert_eq!(m.codomain().unwrap(), b);
        }
    }

    #[test]
    fn symbolic_matrices_with_tails() {
        let a = ObjectLabel::parse(1, "L1-2,1,1").unwrap();
        let b = ObjectLabel::parse(1, "L1-1,0,1").unwrap();
        let ms = enumerate_symbolic_matrices(&a, &b, 4).unwrap();
        assert!(!ms.is_empty());
        for m in &ms {
            assert_eq!(m.domain().unwrap(), a);
            assert_eq!(m.codomain().unwrap(), b);
            assert!(m.offdiag_degree() <= 4);
        }
        // Specializing and dropping negatives recovers the concrete enumeration.
        let mu = [5];
        let concrete: BTreeSet<Vec<Vec<i64>>> = enumerate_marginal_matrices(
            &b.specialize(&mu).unwrap().unwrap(),
            &a.specialize(&mu).unwrap().unwrap(),
        )
        .into_iter()
        .collect();
        let special: BTreeSet<Vec<Vec<i64>>> = ms.iter().filter_map(|m| m.specialize(&mu)).collect();
        assert_eq!(special, concrete);
    }

    #[test]
    fn coarsening_lattice() {
        let p = SetPartition::discrete(2);
        let c = p.coarsenings();
        assert_eq!(c.len(), 2);
        assert!(c.contains(&p));
        assert!(c.contains(&SetPartition::new(2, vec![vec![0, 1]]).unwrap()));
        let top = SetPartition::new(2, vec![vec![1, 0]]).unwrap();
        assert_eq!(top.coarsenings(), vec![top.clone()]);
        assert_eq!(SetPartition::discrete(3).coarsenings().len(), 5);
        let bell = [1, 1, 2, 5, 15, 52, 203];
        for (n, &b) in bell.iter().enumerate() {
            assert_eq!(all_set_partitions(n).len(), b);
        }
    }

    #[test]
    fn dominance() {
        assert!(dominance_leq(&comp(&[1, 1, 1]), &comp(&[3])).unwrap());
        assert!(!dominance_leq(&comp(&[3]), &comp(&[1, 1, 1])).unwrap());
        assert!(dominance_leq(&comp(&[2, 2]), &comp(&[3, 1])).unwrap());
        assert!(dominance_leq(&comp(&[1, 2]), &comp(&[3])).is_err());
    }

    #[test]
    fn small_enumerators() {
        assert_eq!(partitions(5).len(), 7);
        assert_eq!(partitions(16).len(), 231);
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn labels_round_trip() {
        let a = ObjectLabel::parse(2, "L1-1,L2,1").unwrap();
        assert_eq!(a.to_string(), "(L1-1,L2,1)");
        assert_eq!(ObjectLabel::parse_auto("(L1-1,L2,1)").unwrap(), a);
        assert!(ObjectLabel::parse(2, "L1,L2,1").is_err());
        assert_eq!(a.specialize(&[1, 3]).unwrap(), Some(comp(&[0, 3, 1])));
        assert_eq!(a.specialize(&[0, 3]).unwrap(), None);
        let m = CosetMatrix::parse("L1-1,1;1,L2-1").unwrap();
        assert_eq!(m.to_string(), "L1-1,1;1,L2-1");
        assert_eq!(m.specialize(&[1, 0]), None);
    }

    proptest! {
        #[test]
        fn transpose_symmetry(r in prop::collection::vec(0i64..3, 1..4), c in prop::collection::vec(0i64..3, 1..4)) {
            let (r, c) = (comp(&r), comp(&c));
            let a = enumerate_marginal_matrices(&r, &c);
            let b = enumerate_marginal_matrices(&c, &r);
            prop_assert_eq!(a.len(), b.len());
            let ta: BTreeSet<Vec<Vec<i64>>> = a.iter().map(|m| {
                (0..c.len()).map(|k| (0..r.len()).map(|i| m[i][k]).collect()).collect()
            }).collect();
            let sb: BTreeSet<Vec<Vec<i64>>> = b.into_iter().collect();
            prop_assert_eq!(ta, sb);
        }

        #[test]
        fn symbolic_enumeration_is_monotone(s in prop::collection::vec(-2i64..3, 2), d in 0i64..4) {
            let total: i64 = s.iter().sum();
            prop_assume!(total <= 0);
            let tail = comp(&[-total]);
            let a = ObjectLabel::new(s.clone(), tail).unwrap();
            let b = ObjectLabel::generic(2);
            let small = enumerate_symbolic_matrices(&a, &b, d).unwrap();
            let big = enumerate_symbolic_matrices(&a, &b, d + 1).unwrap();
            let filtered: Vec<CosetMatrix> = big.iter().filter(|m| m.offdiag_degree() <= d).cloned().collect();
            prop_assert_eq!(small, filtered);
        }
    }
}
