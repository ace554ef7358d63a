//! Highest-weight scalars against the action on a polytabloid.

use permcat::combinatorics::{enumerate_marginal_matrices, enumerate_symbolic_matrices, partitions};
use permcat::hsmod::{hs_morphism_scalar, hs_scalar_on, Side};
use permcat::schur::{coset_words, lift_concrete, lift_label, oracle_coset_action};
use permcat::{compose_interpolated, Composition, Morphism, ObjectLabel, Rational};

/// Polytabloid of the row-reading tableau of shape `μ`, in the word basis of `M^μ`.
fn polytabloid(mu: &Composition) -> Vec<Rational> {
    let parts: Vec<usize> = mu.parts().iter().map(|&p| p as usize).collect();
    let n: usize = parts.iter().sum();
    let mut row_of = Vec::with_capacity(n);
    let mut columns: Vec<Vec<usize>> = vec![Vec::new(); parts.first().copied().unwrap_or(0)];
    for (r, &len) in parts.iter().enumerate() {
        for c in 0..len {
            columns[c].push(row_of.len());
            row_of.push(r as u8);
        }
    }
    let words = coset_words(mu);
    let mut v = vec![Rational::from_integer(0.into()); words.len()];
    // Column group: independent permutations of each column.
    fn go(c: usize, columns: &[Vec<usize>], word: &mut Vec<u8>, sign: i64, words: &[Vec<u8>], v: &mut [Rational]) {
        if c == columns.len() {
            let i = words.iter().position(|w| w == word).unwrap();
            v[i] += Rational::from_integer(sign.into());
            return;
        }
        let col = &columns[c];
        for p in permcat::combinatorics::permutations(col.len()) {
            let saved: Vec<u8> = col.iter().map(|&x| word[x]).collect();
            for (k, s) in saved.iter().enumerate() {
                word[col[p[k]]] = *s;
            }
            let mut inv = 0;
            for a in 0..p.len() {
                for b in a + 1..p.len() {
                    if p[a] > p[b] {
                        inv += 1;
                    }
                }
            }
            go(c + 1, columns, word, if inv % 2 == 0 { sign } else { -sign }, words, v);
            for (k, &x) in col.iter().enumerate() {
                word[x] = saved[k];
            }
        }
    }
    let mut word = row_of.clone();
    go(0, &columns, &mut word, 1, &words, &mut v);
    v
}

fn apply(m: &permcat::ConcreteMap, v: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::from_integer(0.into()); v.len()];
    for (&(i, j), a) in m.entries() {
        out[i] += a * &v[j];
    }
    out
}

#[test]
fn scalars_match_polytabloid_action() {
    let mut checked = 0;
    for n in 2..=6i64 {
        for mu in partitions(n) {
            if mu.len() > 3 {
                continue;
            }
            let e = polytabloid(&mu);
            assert!(e.iter().any(|x| *x != Rational::from_integer(0.into())));
            let l = mu.len();
            let point: Vec<i64> = mu.parts().to_vec();
            let alpha = lift_label(&mu, &point).unwrap();
            assert_eq!(alpha, ObjectLabel::generic(l));
            for q in enumerate_marginal_matrices(&mu, &mu) {
                let image = apply(&oracle_coset_action(&q, n as usize).unwrap(), &e);
                let pivot = e.iter().position(|x| *x != Rational::from_integer(0.into())).unwrap();
                let c = &image[pivot] / &e[pivot];
                let scaled: Vec<Rational> = e.iter().map(|x| x * &c).collect();
                assert_eq!(image, scaled, "polytabloid is not an eigenvector for {q:?}");
                let lifted = lift_concrete(&q, &point).unwrap();
                let got = hs_scalar_on(&lifted, &alpha, Side::Left).unwrap().eval_int(&point).unwrap();
                assert_eq!(got, c, "μ={mu} q={q:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 50);
}

#[test]
fn module_axiom_both_sides() {
    for s in ["L1,L2", "L1,L2,L3", "L1-1,L2,1", "L1,L2-1,1"] {
        let alpha = ObjectLabel::parse_auto(s).unwrap();
        let basis = enumerate_symbolic_matrices(&alpha, &alpha, 2).unwrap();
        for p in &basis {
            for q in &basis {
                let prod = compose_interpolated(&Morphism::basis(p.clone()).unwrap(), &Morphism::basis(q.clone()).unwrap()).unwrap();
                for side in [Side::Left, Side::Right] {
                    let lhs = hs_morphism_scalar(&prod, side).unwrap();
                    let rhs = &hs_scalar_on(p, &alpha, side).unwrap() * &hs_scalar_on(q, &alpha, side).unwrap();
                    assert_eq!(lhs, rhs, "{alpha} {side:?} p={p} q={q}");
                }
            }
        }
    }
}

#[test]
fn identity_acts_by_one() {
    for l in 1..=4 {
        let a = ObjectLabel::generic(l);
        let id = permcat::CosetMatrix::identity(&a);
        assert_eq!(hs_scalar_on(&id, &a, Side::Left).unwrap(), permcat::IVPoly::one(l));
    }
}
