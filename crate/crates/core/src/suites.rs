//! Seeded verification suites with deterministic text reports.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::category::{compose_at, ideal_contains, IdealSpec};
use crate::combinatorics::{
    enumerate_marginal_matrices, enumerate_symbolic_matrices, partitions, Composition, CosetMatrix, ObjectLabel,
};
use crate::error::{input, Result};
use crate::exact::{rat, rat_frac, Rational};
use crate::glpres::{genfun_identity_check, verify_chevalley, verify_far_commute, verify_serre, GenKind};
use crate::hsmod::{hs_scalar_on, Side};
use crate::schur::{
    compose_interpolated, lift_concrete, module_action_blocks, oracle_coset_action, specialize_morphism, ConcreteMap,
    Morphism,
};

/// Text report and verdict of one suite run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub report: String,
    pub pass: bool,
}

pub const SUITES: [&str; 6] = ["chevalley", "serre", "genfun", "oracle", "ideal", "hs"];

pub fn run_suite(name: &str, samples: usize, seed: u64) -> Result<SuiteOutcome> {
    match name {
        "chevalley" => chevalley_suite(samples, seed),
        "serre" => serre_suite(samples, seed),
        "genfun" => genfun_suite(samples.clamp(1, 6) as i64),
        "oracle" => oracle_suite(samples, seed),
        "ideal" => ideal_suite(samples, seed),
        "hs" => hs_suite(samples, seed),
        other => input(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", "))),
    }
}

/// Label over `l ∈ 1..=4` parameters with offsets in `[−2, 2]` and a tail of
/// total size at most 3.
pub fn random_label(rng: &mut ChaCha8Rng) -> ObjectLabel {
    let l = rng.gen_range(1..=4);
    let total = rng.gen_range(0..=(2 * l as i64).min(3));
    let mut tau = Vec::new();
    let mut left = total;
    while left > 0 {
        let p = rng.gen_range(1..=left);
        tau.push(p);
        left -= p;
    }
    loop {
        let sigma: Vec<i64> = (0..l).map(|_| rng.gen_range(-2..=2)).collect();
        if sigma.iter().sum::<i64>() == -total {
            return ObjectLabel::new(sigma, Composition::new(tau.clone()).expect("positive parts"))
                .expect("offsets balance the tail");
        }
    }
}

fn finish(mut report: String, checks: usize, failures: usize) -> SuiteOutcome {
    let pass = failures == 0;
    let _ = writeln!(
        report,
        "result: {} ({checks} checks, {failures} failures)",
        if pass { "PASS" } else { "FAIL" }
    );
    SuiteOutcome { report, pass }
}

fn witness(report: &mut String, what: &str, residual: &Option<Morphism>) {
    match residual {
        Some(r) => {
            let _ = writeln!(report, "  FAIL {what}: residual {r}");
        }
        None => {
            let _ = writeln!(report, "  FAIL {what}");
        }
    }
}

/// `[e_i, f_j] 1_β = δ_ij h_i 1_β` for `i, j ≤ 4`.
pub fn chevalley_suite(samples: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = format!("suite chevalley seed={seed} samples={samples}\n");
    let (mut checks, mut failures) = (0, 0);
    for _ in 0..samples {
        let beta = random_label(&mut rng);
        let mut local = 0;
        for i in 1..=4 {
            for j in 1..=4 {
                let c = verify_chevalley(i, j, &beta)?;
                checks += 1;
                local += 1;
                if !c.holds {
                    failures += 1;
                    witness(&mut report, &format!("i={i} j={j} at {beta}"), &c.residual);
                }
            }
        }
        let _ = writeln!(report, "{beta} l={} relations={local}", beta.l());
    }
    Ok(finish(report, checks, failures))
}

/// Serre relations for `e` and `f` with neighbours up to 4, and commuting of
/// distant generators.
pub fn serre_suite(samples: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = format!("suite serre seed={seed} samples={samples}\n");
    let (mut checks, mut failures) = (0, 0);
    for _ in 0..samples {
        let beta = random_label(&mut rng);
        let mut local = 0;
        for kind in [GenKind::Raising, GenKind::Lowering] {
            for i in 1..=4usize {
                for up in [true, false] {
                    let j = if up { i + 1 } else { i.wrapping_sub(1) };
                    if !(1..=4).contains(&j) {
                        continue;
                    }
                    let c = verify_serre(i, up, kind, &beta)?;
                    checks += 1;
                    local += 1;
                    if !c.holds {
                        failures += 1;
                        witness(&mut report, &format!("{kind:?} i={i} j={j} at {beta}"), &c.residual);
                    }
                }
                for j in (i + 2)..=4 {
                    let c = verify_far_commute(i, j, kind, &beta)?;
                    checks += 1;
                    local += 1;
                    if !c.holds {
                        failures += 1;
                        witness(&mut report, &format!("{kind:?} commute i={i} j={j} at {beta}"), &c.residual);
                    }
                }
            }
        }
        let _ = writeln!(report, "{beta} l={} relations={local}", beta.l());
    }
    Ok(finish(report, checks, failures))
}

pub fn genfun_suite(degree: i64) -> Result<SuiteOutcome> {
    let mut report = format!("suite genfun degree={degree}\n");
    let (_, table) = genfun_identity_check(degree)?;
    let mut failures = 0;
    for e in &table {
        let ok = e.holds();
        if !ok {
            failures += 1;
        }
        let got = e.expansion.as_ref().map_or("0".to_string(), |m| m.to_string());
        let _ = writeln!(report, "x^{} y^{}: {} {}", e.m, e.n, got, if ok { "ok" } else { "MISMATCH" });
    }
    Ok(finish(report, table.len(), failures))
}

fn oracle_product(r: &[Vec<i64>], s: &[Vec<i64>], d: usize) -> Result<ConcreteMap> {
    oracle_coset_action(r, d)?.compose(&oracle_coset_action(s, d)?)
}

/// Lift `r, s` around `μ`, compose symbolically, specialize, and compare with
/// the coset oracle.
pub fn oracle_pair_agrees(r: &[Vec<i64>], s: &[Vec<i64>], mu: &[i64], d: usize) -> Result<bool> {
    let mut memo = HashMap::new();
    let want = oracle_product(r, s, d)?;
    agrees_with(r, s, mu, &want, &mut memo)
}

type OracleMemo = HashMap<Vec<Vec<i64>>, ConcreteMap>;

fn agrees_with(r: &[Vec<i64>], s: &[Vec<i64>], mu: &[i64], want: &ConcreteMap, memo: &mut OracleMemo) -> Result<bool> {
    let lr = Morphism::basis(lift_concrete(r, mu)?)?;
    let ls = Morphism::basis(lift_concrete(s, mu)?)?;
    let prod = compose_interpolated(&lr, &ls)?;
    let Some(m) = specialize_morphism(&prod, mu)? else {
        return Ok(want.entries().is_empty());
    };
    // Same as realize(), with the coset actions memoized.
    let d = want.d();
    let mut got = ConcreteMap::zero(m.domain().tau().clone(), m.codomain().tau().clone())?;
    for (q, c) in m.terms() {
        let grid: Vec<Vec<i64>> = (0..q.rows()).map(|i| (0..q.cols()).map(|k| q.entry(i, k).offset).collect()).collect();
        cache_oracle(memo, &grid, d)?;
        got = got.add(&memo[&grid].scale(&c.constant_value().expect("concrete coefficient")))?;
    }
    Ok(&got == want)
}

fn cache_oracle(memo: &mut OracleMemo, q: &[Vec<i64>], d: usize) -> Result<()> {
    if !memo.contains_key(q) {
        memo.insert(q.to_vec(), oracle_coset_action(q, d)?);
    }
    Ok(())
}

fn to_comp(p: &Composition) -> Vec<i64> {
    p.parts().to_vec()
}

/// Every composable pair of double-coset matrices between permutation modules
/// of partitions of `d`, lifted around `μ = (d)` and `μ = (α_1, d − α_1)`.
pub fn oracle_exhaustive(d: usize) -> Result<(usize, usize)> {
    let parts = partitions(d as i64);
    let (mut checks, mut failures) = (0, 0);
    let mut oracle = OracleMemo::new();
    for a in &parts {
        for b in &parts {
            for c in &parts {
                let ss = enumerate_marginal_matrices(b, a);
                let rs = enumerate_marginal_matrices(c, b);
                let a1 = to_comp(a)[0];
                let mus = [vec![d as i64], vec![a1, d as i64 - a1]];
                for r in &rs {
                    for s in &ss {
                        cache_oracle(&mut oracle, r, d)?;
                        cache_oracle(&mut oracle, s, d)?;
                        let want = oracle[r.as_slice()].compose(&oracle[s.as_slice()])?;
                        for mu in &mus {
                            checks += 1;
                            if !agrees_with(r, s, mu, &want, &mut oracle)? {
                                failures += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((checks, failures))
}

fn random_composition(rng: &mut ChaCha8Rng, d: usize) -> Composition {
    let mut parts = Vec::new();
    let mut left = d as i64;
    while left > 0 {
        let p = rng.gen_range(1..=left);
        parts.push(p);
        left -= p;
    }
    Composition::new(parts).expect("positive parts")
}

/// Random composable pairs at `d ∈ {3, 4, 5}` lifted around random `μ`.
pub fn oracle_suite(samples: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = format!("suite oracle seed={seed} samples={samples}\n");
    let mut failures = 0;
    for _ in 0..samples {
        let d = rng.gen_range(3..=5usize);
        let (a, b, c) = (random_composition(&mut rng, d), random_composition(&mut rng, d), random_composition(&mut rng, d));
        let s = enumerate_marginal_matrices(&b, &a).choose(&mut rng).cloned().expect("nonempty");
        let r = enumerate_marginal_matrices(&c, &b).choose(&mut rng).cloned().expect("nonempty");
        let l = rng.gen_range(1..=2usize);
        let first = rng.gen_range(0..=d as i64);
        let mu: Vec<i64> = if l == 1 { vec![d as i64] } else { vec![first, d as i64 - first] };
        let ok = oracle_pair_agrees(&r, &s, &mu, d)?;
        if !ok {
            failures += 1;
        }
        let _ = writeln!(report, "d={d} r={r:?} s={s:?} mu={mu:?} {}", if ok { "ok" } else { "MISMATCH" });
    }
    Ok(finish(report, samples, failures))
}

/// Closure of `I_J` under composition and the action of `C_{|λ|}`.
pub fn ideal_suite(samples: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = format!("suite ideal seed={seed} samples={samples}\n");
    let (mut checks, mut failures) = (0, 0);
    let std_obj = ObjectLabel::parse(1, "L1-1,1")?;
    let mut done = 0;
    let mut attempts = 0;
    while done < samples {
        attempts += 1;
        if attempts > samples * 200 + 1000 {
            let _ = writeln!(report, "stopped after {attempts} attempts");
            failures += 1;
            break;
        }
        // λ_1 a small nonnegative integer, λ_2 integer or not.
        let l1 = rat(rng.gen_range(0..=3));
        let l2 = if rng.gen_bool(0.5) { rat(rng.gen_range(0..=3)) } else { rat_frac(2 * rng.gen_range(0..=3) + 1, 2) };
        let lambda = vec![l1, l2];
        let spec = IdealSpec::new(vec![0], lambda.clone())?;
        let mk = |rng: &mut ChaCha8Rng| -> ObjectLabel {
            loop {
                let s0: i64 = rng.gen_range(-2..=1);
                let s1: i64 = rng.gen_range(-1..=1);
                let t = -(s0 + s1);
                if (0..=2).contains(&t) {
                    let tau = if t == 0 { vec![] } else { vec![t] };
                    return ObjectLabel::new(vec![s0, s1], Composition::new(tau).unwrap()).unwrap();
                }
            }
        };
        let (a, b, c) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
        let members: Vec<CosetMatrix> = enumerate_symbolic_matrices(&a, &b, 3)?
            .into_iter()
            .filter(|q| ideal_contains(q, &spec).unwrap_or(false))
            .collect();
        let Some(m) = members.choose(&mut rng).cloned() else { continue };
        let after = enumerate_symbolic_matrices(&b, &c, 2)?;
        let before = enumerate_symbolic_matrices(&c, &a, 2)?;
        let (Some(g), Some(h)) = (after.choose(&mut rng).cloned(), before.choose(&mut rng).cloned()) else {
            continue;
        };
        done += 1;
        let one = |q: &CosetMatrix| [(q.clone(), Rational::from_integer(1.into()))].into_iter().collect();
        let mut bad = Vec::new();
        for (name, prod) in [
            ("g∘m", compose_at(&one(&g), &one(&m), &lambda)?),
            ("m∘h", compose_at(&one(&m), &one(&h), &lambda)?),
        ] {
            checks += 1;
            if let Some(q) = prod.keys().find(|q| !ideal_contains(q, &spec).unwrap_or(false)) {
                bad.push(format!("{name} has {q}"));
            }
        }
        // 1 ⊗ m under the action of M^{(|λ|−1,1)}.
        let bm = module_action_blocks(&Morphism::identity(&std_obj), &Morphism::basis(m.clone())?)?;
        checks += 1;
        for f in bm.blocks.values() {
            for (q, v) in f.evaluate(&lambda)? {
                if !ideal_contains(&q, &spec)? {
                    bad.push(format!("1⊗m has {q} with coefficient {v}"));
                }
            }
        }
        let lam_s: Vec<String> = lambda.iter().map(|v| v.to_string()).collect();
        if bad.is_empty() {
            let _ = writeln!(report, "lambda=({}) m={m} ok", lam_s.join(","));
        } else {
            failures += 1;
            let _ = writeln!(report, "lambda=({}) m={m} FAIL: {}", lam_s.join(","), bad.join("; "));
        }
    }
    Ok(finish(report, checks, failures))
}

/// Module axiom `χ(p∘q) = χ(p)χ(q)` on both sides, and the two-row closed form.
pub fn hs_suite(samples: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = format!("suite hs seed={seed} samples={samples}\n");
    let (mut checks, mut failures) = (0, 0);
    for m in 0..=6i64 {
        let q = crate::glpres::two_row_q(m, m);
        let want = crate::exact::ivp_binomial(&crate::exact::AffineForm::var(1, 0), m as u64, 2).scale(&crate::exact::sign(m));
        let got = hs_scalar_on(&q, &ObjectLabel::generic(2), Side::Left)?;
        checks += 1;
        if got != want {
            failures += 1;
        }
        let _ = writeln!(report, "q({m}) -> {got}");
    }
    for _ in 0..samples {
        let mut alpha = random_label(&mut rng);
        while alpha.l() > 3 {
            alpha = random_label(&mut rng);
        }
        let basis = enumerate_symbolic_matrices(&alpha, &alpha, 2)?;
        let p = basis.choose(&mut rng).cloned().expect("identity is present");
        let q = basis.choose(&mut rng).cloned().expect("identity is present");
        let prod = compose_interpolated(&Morphism::basis(p.clone())?, &Morphism::basis(q.clone())?)?;
        for side in [Side::Left, Side::Right] {
            let lhs = crate::hsmod::hs_morphism_scalar(&prod, side)?;
            let rhs = &hs_scalar_on(&p, &alpha, side)? * &hs_scalar_on(&q, &alpha, side)?;
            checks += 1;
            let ok = lhs == rhs;
            if !ok {
                failures += 1;
            }
            let _ = writeln!(report, "{alpha} {side:?} p={p} q={q} {}", if ok { "ok" } else { "MISMATCH" });
        }
    }
    Ok(finish(report, checks, failures))
}
