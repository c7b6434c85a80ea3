//! Acceptance suite: one PASS/FAIL line per criterion. All comparisons are
//! exact.

use std::process::ExitCode;
use std::time::Instant;

use lattice_hecke::algebra::{AlgElem, Algebra};
use lattice_hecke::coxeter::{CoxeterSystem, CoxeterType};
use lattice_hecke::lattice::{
    check_admissible_map, closed_closure_map, closed_closure_set, enumerate_intermediate_admissible, enumerate_l_2,
    enumerate_l_c, enumerate_l_infinity, enumerate_l_p, parabolic_closure_map, truncation_map, ReflectionSet,
    SubgroupLattice, DEFAULT_MAX_ORBITS,
};
use lattice_hecke::laurent::LaurentPoly;
use lattice_hecke::moebius::{semidirect_product, BlockMatrixElem, Theta};
use lattice_hecke::trace::{
    check_specialization_consistency, det_mod_p, gram_det_from_gram, gram_matrix, trace_property_from_gram, TraceForm,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lattices(w: &CoxeterSystem) -> Vec<SubgroupLattice> {
    let mut out = vec![enumerate_l_infinity(w).unwrap()];
    if w.is_crystallographic() {
        out.push(enumerate_l_p(w).unwrap());
    }
    out.push(enumerate_l_2(w).unwrap());
    out
}

fn suite_groups() -> Vec<CoxeterType> {
    vec![
        CoxeterType::a(1),
        CoxeterType::a(2),
        CoxeterType::a(3),
        CoxeterType::b(2),
        CoxeterType::b(3),
        CoxeterType::i2(5),
        CoxeterType::i2(6),
    ]
}

fn criterion_relations() -> Outcome {
    let mut cases = 0;
    let mut vectors = 0;
    for ct in suite_groups() {
        let w = CoxeterSystem::new(ct);
        for l in lattices(&w) {
            let alg = Algebra::new(&w, &l);
            for r in alg.verify_relations() {
                ensure(r.passed, || format!("{ct} {} {}: {:?}", l.kind(), r.relation, r.witness))?;
            }
            cases += 1;
            vectors += alg.dimension();
        }
    }
    Ok(format!("{cases} (group, lattice) cases, {vectors} basis vectors"))
}

fn criterion_d4_d5() -> Outcome {
    let d4 = CoxeterSystem::new(CoxeterType::d(4));
    let linf = enumerate_l_infinity(&d4).unwrap();
    let s4 = enumerate_intermediate_admissible(&d4, &linf, DEFAULT_MAX_ORBITS).unwrap();
    ensure(s4.complement.len() == 1, || format!("D4 complement has {} orbits", s4.complement.len()))?;
    ensure(s4.complement[0].subgroup_type == "A1^4", || format!("D4 orbit type {}", s4.complement[0].subgroup_type))?;
    ensure(s4.strict().count() == 0, || "D4 has a strict intermediate lattice".into())?;

    let d5 = CoxeterSystem::new(CoxeterType::d(5));
    let linf = enumerate_l_infinity(&d5).unwrap();
    let s5 = enumerate_intermediate_admissible(&d5, &linf, DEFAULT_MAX_ORBITS).unwrap();
    ensure(s5.complement.len() == 2, || format!("D5 complement has {} orbits", s5.complement.len()))?;
    let strict: Vec<String> = s5
        .strict()
        .map(|l| l.added.iter().map(|&k| s5.complement[k].subgroup_type.clone()).collect::<Vec<_>>().join("+"))
        .collect();
    ensure(!strict.is_empty(), || "D5 has no strict intermediate lattice".into())?;
    let types: Vec<&str> = s5.complement.iter().map(|c| c.subgroup_type.as_str()).collect();
    Ok(format!(
        "D4: one orbit of 3 A1^4; D5: orbits {types:?}, strict admissible additions {strict:?}, |L_inf(D5)| = {}",
        linf.len()
    ))
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn bell(n: usize) -> usize {
    // B(n+1) = Σ_k C(n,k) B(k)
    let mut b = vec![1usize];
    for m in 0..n {
        let mut next = 0;
        let mut binom = 1;
        for k in 0..=m {
            next += binom * b[k];
            binom = binom * (m - k) / (k + 1);
        }
        b.push(next);
    }
    b[n]
}

fn criterion_braids_and_ties() -> Outcome {
    let mut dims = Vec::new();
    for n in 2..=4 {
        let w = CoxeterSystem::new(CoxeterType::a(n - 1));
        let linf = enumerate_l_infinity(&w).unwrap();
        let lp = enumerate_l_p(&w).unwrap();
        let dim = Algebra::new(&w, &linf).dimension();
        ensure(dim == factorial(n) * bell(n), || format!("A{} dimension {dim}", n - 1))?;
        let same = linf.len() == lp.len() && (0..linf.len()).all(|i| lp.index_of(linf.set(i)).is_some());
        ensure(same, || format!("A{}: L_inf != L_p", n - 1))?;
        dims.push(dim);
    }
    ensure(dims == [4, 30, 360], || format!("dimensions {dims:?}"))?;
    Ok(format!("dimensions {dims:?}, L_inf = L_p"))
}

fn criterion_blocks() -> Outcome {
    let mut cases = 0;
    for ct in suite_groups() {
        let w = CoxeterSystem::new(ct);
        for l in lattices(&w) {
            let alg = Algebra::new(&w, &l);
            let p = alg.check_peirce();
            ensure(p.passed, || format!("{ct} {}: {:?}", l.kind(), p.failures.first()))?;
            let b = alg.block_dimension_report();
            ensure(b.total == b.expected_total, || format!("{ct} {}: block total {}", l.kind(), b.total))?;
            if l.kind() == lattice_hecke::lattice::LatticeKind::L2 {
                // kW at the trivial subgroup, the Hecke algebra at W, matrix
                // blocks over the reflection classes
                let rows = &b.rows;
                // in rank one the cyclic subgroup is W itself
                let expected = 1 + w.num_classes() + usize::from(w.rank() > 1);
                ensure(rows.len() == expected, || format!("{ct} L2 has {} orbits", rows.len()))?;
                ensure(rows[0].orbit_size == 1 && rows[0].stabilizer_order == w.order(), || "trivial block".into())?;
                let last = rows.last().unwrap();
                ensure(last.orbit_size == 1 && last.stabilizer_order == w.order(), || "top block".into())?;
                if w.rank() > 1 {
                    let class_sizes: usize = rows[1..rows.len() - 1].iter().map(|r| r.orbit_size).sum();
                    ensure(class_sizes == w.num_reflections(), || "reflection blocks".into())?;
                }
                ensure(alg.check_group_corner(), || format!("{ct}: trivial corner is not kW"))?;
                ensure(alg.check_hecke_corner(), || format!("{ct}: top corner is not the Hecke algebra"))?;
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} (group, lattice) cases, dimensions and corners exact"))
}

fn criterion_theta() -> Outcome {
    let mut out = Vec::new();
    for ct in [CoxeterType::a(2), CoxeterType::b(2)] {
        let w = CoxeterSystem::new(ct);
        let l = enumerate_l_infinity(&w).unwrap();
        let th = Theta::new(&w, &l);
        let imgs: Vec<BlockMatrixElem> = (0..w.order()).map(|g| th.group(&w, g)).collect();
        for g in 0..w.order() {
            for h in 0..w.order() {
                ensure(imgs[g].mul(&imgs[h], &w) == imgs[w.mul(g, h)], || format!("{ct}: θ(g)θ(h) != θ(gh)"))?;
            }
        }
        let n = l.len();
        let basis: Vec<BlockMatrixElem> =
            (0..w.order()).flat_map(|g| (0..n).map(move |a| (g, a))).map(|(g, a)| th.basis_image(&w, g, a)).collect();
        for g in 0..w.order() {
            for a in 0..n {
                for h in 0..w.order() {
                    for b in 0..n {
                        let lhs = basis[g * n + a].mul(&basis[h * n + b], &w);
                        let rhs = match semidirect_product(&w, &th, (g, a), (h, b)) {
                            Some((k, c)) => basis[k * n + c].clone(),
                            None => BlockMatrixElem::zero(th.block_sizes()),
                        };
                        ensure(lhs == rhs, || format!("{ct}: θ not multiplicative on the semidirect basis"))?;
                    }
                }
            }
        }
        let d = th.bijectivity_determinant(&w).ok_or_else(|| format!("{ct}: θ matrix not square"))?;
        ensure(!d.is_zero(), || format!("{ct}: θ determinant vanishes"))?;
        out.push(format!("{ct} det {d}"));
    }
    Ok(out.join(", "))
}

fn criterion_trace() -> Outcome {
    let groups = [CoxeterType::a(1), CoxeterType::a(2), CoxeterType::b(2), CoxeterType::i2(5), CoxeterType::a(3)];
    let mut out = Vec::new();
    for ct in groups {
        let w = CoxeterSystem::new(ct);
        for l in [enumerate_l_infinity(&w).unwrap(), enumerate_l_2(&w).unwrap()] {
            let alg = Algebra::new(&w, &l);
            let form = TraceForm::closed_form(&alg);
            let gram = gram_matrix(&alg, &form);
            let r = trace_property_from_gram(&alg, &gram);
            ensure(r.passed, || format!("{ct} {}: trace property fails: {:?}", l.kind(), r.witness))?;
            let values: Vec<u64> = (0..alg.num_parameters()).map(|k| 7 + 3 * k as u64).collect();
            let fast = det_mod_p(&gram, 1_000_000_007, &values);
            let det = gram_det_from_gram(&alg, &gram);
            ensure(!det.is_zero(), || format!("{ct} {}: Gram determinant is zero", l.kind()))?;
            if ct == CoxeterType::a(1) {
                let u = LaurentPoly::var(0);
                ensure(det == u || det == -u.clone(), || format!("A1 Gram determinant {det}"))?;
            }
            ensure(fast != 0, || format!("{ct} {}: Gram determinant vanishes mod p", l.kind()))?;
            out.push(format!("{ct}/{}: det {det}", l.kind()));
        }
    }
    Ok(out.join(", "))
}

fn criterion_specialization() -> Outcome {
    let mut cases = 0;
    for ct in [CoxeterType::a(1), CoxeterType::a(2), CoxeterType::b(2)] {
        let w = CoxeterSystem::new(ct);
        for l in [enumerate_l_infinity(&w).unwrap(), enumerate_l_2(&w).unwrap()] {
            let alg = Algebra::new(&w, &l);
            if let Some((a, b)) = alg.check_semidirect_specialization() {
                return Err(format!("{ct} {}: {} · {}", l.kind(), alg.describe(a), alg.describe(b)));
            }
            let r = check_specialization_consistency(&alg, &TraceForm::closed_form(&alg));
            ensure(r.passed, || format!("{ct} {}: {:?}", l.kind(), r.witness))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} cases, structure constants and θ-route trace agree at u = 1"))
}

fn criterion_matsumoto_associativity() -> Outcome {
    let mut words_checked = 0;
    for ct in [CoxeterType::a(2), CoxeterType::b(2), CoxeterType::a(3)] {
        let w = CoxeterSystem::new(ct);
        let l = enumerate_l_infinity(&w).unwrap();
        let alg = Algebra::new(&w, &l);
        let keys = alg.basis_keys();
        for g in 0..w.order() {
            let words = w.all_reduced_words(g);
            if words.len() < 2 {
                continue;
            }
            for &(v, y) in &keys {
                let b = AlgElem::basis(v, y);
                let first = alg.mult_word(&words[0], &b);
                for word in &words[1..] {
                    ensure(alg.mult_word(word, &b) == first, || format!("{ct}: word dependence at {word:?}"))?;
                    words_checked += 1;
                }
            }
        }
    }

    let w = CoxeterSystem::new(CoxeterType::a(1));
    let l = enumerate_l_infinity(&w).unwrap();
    let alg = Algebra::new(&w, &l);
    let keys = alg.basis_keys();
    for &a in &keys {
        for &b in &keys {
            for &c in &keys {
                let (a, b, c) = (AlgElem::basis(a.0, a.1), AlgElem::basis(b.0, b.1), AlgElem::basis(c.0, c.1));
                let lhs = alg.multiply(&a, &alg.multiply(&b, &c));
                let rhs = alg.multiply(&alg.multiply(&a, &b), &c);
                ensure(lhs == rhs, || "A1 associativity".into())?;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(20_241_016);
    for ct in [CoxeterType::a(2), CoxeterType::b(2), CoxeterType::a(3)] {
        let w = CoxeterSystem::new(ct);
        let l = enumerate_l_infinity(&w).unwrap();
        let alg = Algebra::new(&w, &l);
        let keys = alg.basis_keys();
        for _ in 0..1000 {
            let [a, b, c] = [0; 3].map(|_| {
                let k = keys[rng.gen_range(0..keys.len())];
                AlgElem::basis(k.0, k.1)
            });
            let lhs = alg.multiply(&a, &alg.multiply(&b, &c));
            let rhs = alg.multiply(&alg.multiply(&a, &b), &c);
            ensure(lhs == rhs, || format!("{ct}: associativity fails"))?;
        }
    }
    Ok(format!("{words_checked} alternative-word products, 64 + 3x1000 associativity triples"))
}

fn criterion_maps() -> Outcome {
    for ct in [CoxeterType::a(3), CoxeterType::b(2), CoxeterType::b(3), CoxeterType::d(4)] {
        let w = CoxeterSystem::new(ct);
        let linf = enumerate_l_infinity(&w).unwrap();
        let lp = enumerate_l_p(&w).unwrap();
        let lc = enumerate_l_c(&w).unwrap();
        let l2 = enumerate_l_2(&w).unwrap();
        let fp = parabolic_closure_map(&w, &linf, &lp).map_err(|e| e.to_string())?;
        ensure(check_admissible_map(&w, &linf, &lp, &fp), || format!("{ct}: parabolic closure"))?;
        let fc = closed_closure_map(&w, &linf, &lc).map_err(|e| e.to_string())?;
        ensure(check_admissible_map(&w, &linf, &lc, &fc), || format!("{ct}: closed closure"))?;
        let ft = truncation_map(&linf, &l2);
        ensure(check_admissible_map(&w, &linf, &l2, &ft), || format!("{ct}: truncation to L2"))?;
    }
    let b2 = CoxeterSystem::new(CoxeterType::b(2));
    let roots = b2.roots().unwrap();
    let short: ReflectionSet = (0..4).filter(|&t| roots[t].iter().filter(|&&c| c != 0).count() == 1).collect();
    let linf = enumerate_l_infinity(&b2).unwrap();
    let lc = enumerate_l_c(&b2).unwrap();
    ensure(linf.index_of(&short).is_some(), || "short-root subgroup missing from L_inf".into())?;
    ensure(lc.index_of(&short).is_none(), || "short-root subsystem is closed".into())?;
    ensure(closed_closure_set(&b2, &short).unwrap().len() == 4, || "closure of short roots".into())?;
    Ok(format!("A3, B2, B3, D4 maps admissible; B2 |L_c| = {} < |L_inf| = {}", lc.len(), linf.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("relation suite", criterion_relations),
        ("D4/D5 intermediate lattices", criterion_d4_d5),
        ("braids-and-ties dimensions", criterion_braids_and_ties),
        ("block/Peirce structure", criterion_blocks),
        ("theta isomorphism", criterion_theta),
        ("symmetrizing trace", criterion_trace),
        ("specialization at u = 1", criterion_specialization),
        ("Matsumoto and associativity", criterion_matsumoto_associativity),
        ("admissible maps", criterion_maps),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}) [{secs:.1}s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}) [{secs:.1}s]: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
