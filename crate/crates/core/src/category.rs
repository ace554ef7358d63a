//! Objects and morphisms of the interpolated category: identities, the
//! module action of the one-parameter category, braiding, tensor ideals,
//! specialization functors, and idempotent-split objects.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::combinatorics::{Composition, CosetMatrix, ObjectLabel};
use crate::error::{input, Result};
use crate::exact::{AffineForm, Rational};
use crate::schur::{
    compose_basis, compose_interpolated, flat_positions, module_action_blocks, specialize_morphism, BlockMap,
    Morphism, TensorBlock,
};

pub fn identity_of(alpha: &ObjectLabel) -> Morphism {
    Morphism::identity(alpha)
}

/// `f ⊗ g` with `f` over `|λ|` acting on `g` over `λ`.
pub fn module_action(f: &Morphism, g: &Morphism) -> Result<BlockMap> {
    module_action_blocks(f, g)
}

/// Symmetry of the one-parameter tensor product on a block.
pub fn braiding(block: &TensorBlock) -> TensorBlock {
    block.transpose()
}

/// The isomorphism `M^γ → M^{γ^T}` realizing the braiding on one block
/// (one-parameter context).
pub fn braiding_morphism(block: &TensorBlock) -> Result<Morphism> {
    let t = block.transpose();
    let src = flat_positions(block.rows, block.cols, 1);
    let tgt = flat_positions(t.rows, t.cols, 1);
    let mut grid = vec![AffineForm::constant(0); src.len() * tgt.len()];
    for (j, &(a, b)) in src.iter().enumerate() {
        let i = tgt.iter().position(|&p| p == (b, a)).expect("transposed cell");
        grid[i * src.len() + j] = block.get(a, b);
    }
    Morphism::basis(CosetMatrix::from_grid(1, tgt.len(), src.len(), &grid)?)
}

/// Specialized parameters and the index set `J` of a tensor ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealSpec {
    /// 0-based indices into `λ`.
    pub j: Vec<usize>,
    pub lambda_values: Vec<Rational>,
}

impl IdealSpec {
    pub fn new(j: Vec<usize>, lambda_values: Vec<Rational>) -> Result<Self> {
        if j.is_empty() {
            return input("ideal needs a nonempty index set");
        }
        if j.iter().any(|&i| i >= lambda_values.len()) {
            return input("ideal index outside the parameter range");
        }
        Ok(IdealSpec { j, lambda_values })
    }
}

/// `true` iff some diagonal entry indexed by `J` evaluates to a negative integer.
pub fn ideal_contains(term: &CosetMatrix, spec: &IdealSpec) -> Result<bool> {
    if term.l() != spec.lambda_values.len() {
        return input("ideal parameters do not match the matrix context");
    }
    Ok(spec.j.iter().any(|&i| {
        let e = term.entry(i, i);
        let v = &spec.lambda_values[i] + Rational::from_integer(e.offset.into());
        v.is_integer() && v.is_negative()
    }))
}

/// Coefficients at the ideal's parameters with ideal terms removed.
pub fn reduce_mod_ideal(f: &Morphism, spec: &IdealSpec) -> Result<BTreeMap<CosetMatrix, Rational>> {
    let mut out = f.evaluate(&spec.lambda_values)?;
    let mut keep = BTreeMap::new();
    for (q, v) in std::mem::take(&mut out) {
        if !ideal_contains(&q, spec)? {
            keep.insert(q, v);
        }
    }
    Ok(keep)
}

/// Composition of morphisms already evaluated at `λ`.
pub fn compose_at(
    f: &BTreeMap<CosetMatrix, Rational>,
    g: &BTreeMap<CosetMatrix, Rational>,
    lambda: &[Rational],
) -> Result<BTreeMap<CosetMatrix, Rational>> {
    let mut out: BTreeMap<CosetMatrix, Rational> = BTreeMap::new();
    for (r, cr) in f {
        for (s, cs) in g {
            let crs = cr * cs;
            for (q, c) in compose_basis(r, s)?.iter() {
                *out.entry(q.clone()).or_insert_with(Rational::zero) += &crs * c.eval(lambda)?;
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// Image of an object under `λ ↦ μ`; `None` is the zero object.
pub fn functor_f_mu_object(alpha: &ObjectLabel, mu: &[i64]) -> Result<Option<Composition>> {
    alpha.specialize(mu)
}

pub fn functor_f_mu(f: &Morphism, mu: &[i64]) -> Result<Option<Morphism>> {
    specialize_morphism(f, mu)
}

/// Matrix of morphisms between direct sums of objects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismMatrix {
    pub domain: Vec<ObjectLabel>,
    pub codomain: Vec<ObjectLabel>,
    /// `entries[i][j]`: component from domain `j` to codomain `i`.
    pub entries: Vec<Vec<Morphism>>,
}

impl MorphismMatrix {
    pub fn identity(objects: &[ObjectLabel]) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, a) in objects.iter().enumerate() {
            let mut row = Vec::new();
            for (j, b) in objects.iter().enumerate() {
                row.push(if i == j { Morphism::identity(a) } else { Morphism::zero(b.clone(), a.clone())? });
            }
            entries.push(row);
        }
        Ok(MorphismMatrix { domain: objects.to_vec(), codomain: objects.to_vec(), entries })
    }

    pub fn compose(&self, other: &MorphismMatrix) -> Result<MorphismMatrix> {
        if other.codomain != self.domain {
            return input("morphism matrices do not compose");
        }
        let mut entries = Vec::new();
        for (i, c) in self.codomain.iter().enumerate() {
            let mut row = Vec::new();
            for (j, d) in other.domain.iter().enumerate() {
                let mut acc = Morphism::zero(d.clone(), c.clone())?;
                for k in 0..self.domain.len() {
                    acc = acc.add(&compose_interpolated(&self.entries[i][k], &other.entries[k][j])?)?;
                }
                row.push(acc);
            }
            entries.push(row);
        }
        Ok(MorphismMatrix { domain: other.domain.clone(), codomain: self.codomain.clone(), entries })
    }

    pub fn sub(&self, other: &MorphismMatrix) -> Result<MorphismMatrix> {
        let mut out = self.clone();
        for (i, row) in out.entries.iter_mut().enumerate() {
            for (j, m) in row.iter_mut().enumerate() {
                *m = m.sub(&other.entries[i][j])?;
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Morphism::is_zero)
    }
}

/// Object of the idempotent completion: a direct sum with an idempotent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KaroubiObject {
    pub objects: Vec<ObjectLabel>,
    pub idempotent: MorphismMatrix,
}

impl KaroubiObject {
    pub fn new(objects: Vec<ObjectLabel>, idempotent: MorphismMatrix) -> Result<Self> {
        if idempotent.domain != objects || idempotent.codomain != objects {
            return input("idempotent does not act on the listed objects");
        }
        if !idempotent.compose(&idempotent)?.sub(&idempotent)?.is_zero() {
            return Err(crate::Error::Verification("matrix is not idempotent".into()));
        }
        Ok(KaroubiObject { objects, idempotent })
    }

    pub fn plain(alpha: &ObjectLabel) -> Self {
        let objects = vec![alpha.clone()];
        KaroubiObject { idempotent: MorphismMatrix::identity(&objects).unwrap(), objects }
    }

    /// Single-object summand cut out by `e`.
    pub fn summand(e: Morphism) -> Result<Self> {
        let objects = vec![e.domain().clone()];
        let m = MorphismMatrix { domain: objects.clone(), codomain: objects.clone(), entries: vec![vec![e]] };
        KaroubiObject::new(objects, m)
    }
}
