//! JSON document format for morphisms.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{Composition, CosetMatrix, ObjectLabel};
use crate::error::{Error, Result};
use crate::exact::IVPoly;
use crate::schur::{BlockMap, Morphism};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelDoc {
    pub sigma: Vec<i64>,
    pub tau: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub diag_offsets: Vec<i64>,
    /// Row-major; symbolic diagonal slots hold 0.
    pub entries: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub coeff: String,
    pub matrix: MatrixDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismDoc {
    pub l: usize,
    pub char_zero: bool,
    pub domain: LabelDoc,
    pub codomain: LabelDoc,
    pub terms: Vec<TermDoc>,
}

fn label_doc(a: &ObjectLabel) -> LabelDoc {
    LabelDoc { sigma: a.sigma().to_vec(), tau: a.tau().parts().to_vec() }
}

fn label_from(d: &LabelDoc) -> Result<ObjectLabel> {
    ObjectLabel::new(d.sigma.clone(), Composition::new(d.tau.clone())?)
}

pub fn morphism_to_doc(f: &Morphism) -> MorphismDoc {
    MorphismDoc {
        l: f.l(),
        char_zero: f.char_zero(),
        domain: label_doc(f.domain()),
        codomain: label_doc(f.codomain()),
        terms: f
            .terms()
            .iter()
            .map(|(q, c)| TermDoc {
                coeff: c.to_string(),
                matrix: MatrixDoc {
                    rows: q.rows(),
                    cols: q.cols(),
                    diag_offsets: q.diag_offsets(),
                    entries: q.concrete_entries(),
                },
            })
            .collect(),
    }
}

pub fn morphism_from_doc(d: &MorphismDoc) -> Result<Morphism> {
    let dom = label_from(&d.domain)?;
    let cod = label_from(&d.codomain)?;
    if dom.l() != d.l || cod.l() != d.l {
        return Err(Error::Input(format!("labels do not have {} parameters", d.l)));
    }
    let mut terms = Vec::with_capacity(d.terms.len());
    for t in &d.terms {
        let m = &t.matrix;
        let q = CosetMatrix::from_parts(d.l, m.rows, m.cols, &m.diag_offsets, &m.entries)?;
        terms.push((q, IVPoly::parse(&t.coeff, d.l)?));
    }
    Ok(Morphism::from_terms(dom, cod, terms)?.with_char_zero(d.char_zero))
}

/// Pretty-printed document with a trailing newline.
pub fn morphism_to_json(f: &Morphism) -> String {
    let mut s = serde_json::to_string_pretty(&morphism_to_doc(f)).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn morphism_from_json(s: &str) -> Result<Morphism> {
    let d: MorphismDoc = serde_json::from_str(s).map_err(|e| Error::Input(format!("malformed morphism file: {e}")))?;
    morphism_from_doc(&d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDoc {
    pub source: usize,
    pub target: usize,
    pub morphism: MorphismDoc,
}

/// Block decomposition of a tensor product; blocks are given by their labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockMapDoc {
    pub l: usize,
    pub sources: Vec<String>,
    pub targets: Vec<String>,
    pub blocks: Vec<BlockDoc>,
}

pub fn blockmap_to_json(b: &BlockMap) -> String {
    let doc = BlockMapDoc {
        l: b.l,
        sources: b.sources.iter().map(|t| t.to_string()).collect(),
        targets: b.targets.iter().map(|t| t.to_string()).collect(),
        blocks: b
            .blocks
            .iter()
            .map(|(&(source, target), m)| BlockDoc { source, target, morphism: morphism_to_doc(m) })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeff() -> IVPoly {
        let l1 = IVPoly::var(2, 0);
        let half = crate::exact::rat_frac(1, 2);
        &(&(&l1 * &l1).scale(&half) - &IVPoly::var(2, 1)) + &IVPoly::from_int(2, 3)
    }

    #[test]
    fn round_trip() {
        let q = CosetMatrix::parse("L1-1,1;1,L2-1").unwrap();
        let f = Morphism::basis(q.clone())
            .unwrap()
            .scale(&coeff());
        let s = morphism_to_json(&f);
        assert!(s.starts_with("{\n  \"l\": 2,\n  \"char_zero\": false,\n  \"domain\""));
        let g = morphism_from_json(&s).unwrap();
        assert_eq!(f, g);
        assert_eq!(morphism_to_json(&g), s);
        assert!(morphism_from_json("{").is_err());
    }

    #[test]
    fn zero_morphism() {
        let a = ObjectLabel::parse(1, "L1-1,1").unwrap();
        let z = Morphism::zero(a.clone(), a).unwrap();
        assert_eq!(morphism_from_json(&morphism_to_json(&z)).unwrap(), z);
    }
}
