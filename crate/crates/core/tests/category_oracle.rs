//! Tensor products and braiding against the coset-action oracle.

use std::collections::HashMap;

use permcat::category::{braiding, braiding_morphism};
use permcat::combinatorics::enumerate_symbolic_matrices;
use permcat::schur::{coset_words, realize, specialize_to_map, tensor_blocks, tensor_interpolated, TensorBlock};
use permcat::{compose_interpolated, ConcreteMap, Morphism, ObjectLabel, Rational};

/// Specialized block cells in flattened order, or `None` if some cell is negative.
fn flat_cells(b: &TensorBlock, d: i64) -> Option<Vec<(usize, usize, i64)>> {
    let mut out = Vec::new();
    for (a, c) in permcat::schur::flat_positions(b.rows, b.cols, 1) {
        let v = b.get(a, c).eval(&[d]);
        if v < 0 {
            return None;
        }
        out.push((a, c, v));
    }
    Some(out)
}

/// Pair words of a block: the word over flattened cells, split into its two factors.
fn split(word: &[u8], cells: &[(usize, usize, i64)]) -> (Vec<u8>, Vec<u8>) {
    word.iter().map(|&k| (cells[k as usize].0 as u8, cells[k as usize].1 as u8)).unzip()
}

fn join(w1: &[u8], w2: &[u8], cells: &[(usize, usize, i64)]) -> Option<Vec<u8>> {
    let index: HashMap<(usize, usize), u8> = cells.iter().enumerate().map(|(k, &(a, b, _))| ((a, b), k as u8)).collect();
    w1.iter().zip(w2).map(|(&a, &b)| index.get(&(a as usize, b as usize)).copied()).collect()
}

fn counts(w1: &[u8], w2: &[u8], cells: &[(usize, usize, i64)]) -> bool {
    let mut c: HashMap<(usize, usize), i64> = HashMap::new();
    for (&a, &b) in w1.iter().zip(w2) {
        *c.entry((a as usize, b as usize)).or_insert(0) += 1;
    }
    cells.iter().all(|&(a, b, v)| c.get(&(a, b)).copied().unwrap_or(0) == v)
}

/// `(f ⊗ g)` restricted to each pair of specialized blocks, computed from the
/// ordinary Kronecker product of the two concrete maps.
fn check_tensor(f: &Morphism, g: &Morphism, d: i64) -> usize {
    let (Some(ff), Some(gg)) = (specialize_to_map(f, &[d]).unwrap(), specialize_to_map(g, &[d]).unwrap()) else {
        return 0;
    };
    let mut compared = 0;
    let bm = tensor_interpolated(f, g).unwrap();
    let dom1 = coset_words(ff.domain());
    let dom2 = coset_words(gg.domain());
    let cod1 = coset_words(ff.codomain());
    let cod2 = coset_words(gg.codomain());
    let idx = |ws: &[Vec<u8>]| -> HashMap<Vec<u8>, usize> { ws.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect() };
    let (i_dom1, i_dom2) = (idx(&dom1), idx(&dom2));
    let mut seen_sources = 0;
    for (si, src) in bm.sources.iter().enumerate() {
        let Some(sc) = flat_cells(src, d) else { continue };
        seen_sources += 1;
        for (ti, tgt) in bm.targets.iter().enumerate() {
            let Some(tc) = flat_cells(tgt, d) else { continue };
            let src_words = coset_words(&permcat::Composition::new(sc.iter().map(|c| c.2).collect()).unwrap());
            let tgt_words = coset_words(&permcat::Composition::new(tc.iter().map(|c| c.2).collect()).unwrap());
            let t_index = idx(&tgt_words);
            let got: Option<ConcreteMap> = match bm.blocks.get(&(si, ti)) {
                Some(m) => specialize_to_map(m, &[d]).unwrap(),
                None => None,
            };
            for (j, u) in src_words.iter().enumerate() {
                let (w1, w2) = split(u, &sc);
                let (c1, c2) = (i_dom1[&w1], i_dom2[&w2]);
                let mut want: HashMap<usize, Rational> = HashMap::new();
                for (p, v1) in cod1.iter().enumerate() {
                    let a = ff.get(p, c1);
                    if a == Rational::from_integer(0.into()) {
                        continue;
                    }
                    for (q, v2) in cod2.iter().enumerate() {
                        let b = gg.get(q, c2);
                        if b == Rational::from_integer(0.into()) || !counts(v1, v2, &tc) {
                            continue;
                        }
                        let w = join(v1, v2, &tc).expect("target cells cover the pair");
                        *want.entry(t_index[&w]).or_insert_with(|| Rational::from_integer(0.into())) += &a * &b;
                    }
                }
                want.retain(|_, v| *v != Rational::from_integer(0.into()));
                for i in 0..tgt_words.len() {
                    let g_val = got.as_ref().map_or(Rational::from_integer(0.into()), |m| m.get(i, j));
                    let w_val = want.get(&i).cloned().unwrap_or_else(|| Rational::from_integer(0.into()));
                    assert_eq!(g_val, w_val, "f={f} g={g} d={d} block {src} -> {tgt} entry ({i},{j})");
                    compared += 1;
                }
            }
        }
    }
    assert!(seen_sources > 0);
    compared
}

fn basis_morphisms(a: &ObjectLabel, b: &ObjectLabel, max_deg: i64) -> Vec<Morphism> {
    enumerate_symbolic_matrices(a, b, max_deg)
        .unwrap()
        .into_iter()
        .map(|q| Morphism::basis(q).unwrap())
        .collect()
}

#[test]
fn tensor_matches_kronecker_product() {
    let mut compared = 0;
    let labels = ["L1", "L1-1,1", "L1-2,2", "L1-2,1,1"].map(|s| ObjectLabel::parse(1, s).unwrap());
    for a in &labels[..3] {
        for b in &labels[..3] {
            for f in basis_morphisms(a, b, 2) {
                for g in basis_morphisms(&labels[1], &labels[1], 1) {
                    for d in [3, 4] {
                        compared += check_tensor(&f, &g, d);
                    }
                }
            }
        }
    }
    let id = Morphism::identity(&labels[3]);
    for f in basis_morphisms(&labels[1], &labels[2], 1) {
        compared += check_tensor(&f, &id, 5);
    }
    assert!(compared > 10_000, "{compared}");
}

#[test]
fn specialized_blocks_cover_all_double_cosets() {
    let a = ObjectLabel::parse(1, "L1-1,1").unwrap();
    let b = ObjectLabel::parse(1, "L1-2,2").unwrap();
    let blocks = tensor_blocks(&a, &b).unwrap();
    for d in 2..=6i64 {
        let valid = blocks.iter().filter(|g| flat_cells(g, d).is_some()).count();
        let ca = permcat::Composition::new(vec![d - 1, 1]).unwrap();
        let cb = permcat::Composition::new(vec![d - 2, 2]).unwrap();
        assert_eq!(valid, permcat::combinatorics::enumerate_marginal_matrices(&ca, &cb).len(), "d={d}");
    }
}

#[test]
fn braiding_swaps_tensor_factors() {
    let a = ObjectLabel::parse(1, "L1-2,1,1").unwrap();
    let b = ObjectLabel::parse(1, "L1-1,1").unwrap();
    let d = 5;
    for g in tensor_blocks(&a, &b).unwrap() {
        let Some(sc) = flat_cells(&g, d) else { continue };
        let t = braiding(&g);
        let tc = flat_cells(&t, d).unwrap();
        let c = realize(&permcat::specialize_morphism(&braiding_morphism(&g).unwrap(), &[d]).unwrap().unwrap()).unwrap();
        let src_words = coset_words(c.domain());
        let tgt_words = coset_words(c.codomain());
        for (j, u) in src_words.iter().enumerate() {
            let (w1, w2) = split(u, &sc);
            let swapped = join(&w2, &w1, &tc).unwrap();
            let i = tgt_words.iter().position(|w| *w == swapped).unwrap();
            assert_eq!(c.get(i, j), Rational::from_integer(1.into()));
        }
        assert_eq!(c.entries().len(), src_words.len());
    }
}

#[test]
fn braiding_is_natural() {
    let a = ObjectLabel::parse(1, "L1-1,1").unwrap();
    let b = ObjectLabel::parse(1, "L1-2,2").unwrap();
    for f in basis_morphisms(&a, &a, 1) {
        for g in basis_morphisms(&b, &b, 1) {
            let fg = tensor_interpolated(&f, &g).unwrap();
            let gf = tensor_interpolated(&g, &f).unwrap();
            for (&(si, ti), m) in &fg.blocks {
                let (src, tgt) = (&fg.sources[si], &fg.targets[ti]);
                let lhs = compose_interpolated(&braiding_morphism(tgt).unwrap(), m).unwrap();
                let other = gf.block(&braiding(src), &braiding(tgt)).expect("transposed block present");
                let rhs = compose_interpolated(other, &braiding_morphism(src).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}
