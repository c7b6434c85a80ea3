//! A symmetrizing trace on `C(W, L)`.
//!
//! The candidate is `t(g_w e_L) = δ_{w,1} ζ(L)` where `ζ(L)` counts the
//! lattice elements containing `L`. Equivalently `t(g_w ε_x) = δ_{w,1}`. The
//! trace property and nondegeneracy are verified, not assumed.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{AlgElem, Algebra, BasisKey};
use crate::lattice::SubgroupLattice;
use crate::laurent::{self, mod_inverse, LaurentPoly};
use crate::moebius::Theta;

/// `ζ(x) = #{y ∈ L : y ⊇ x}`.
pub fn zeta_counts(l: &SubgroupLattice) -> Vec<usize> {
    (0..l.len()).map(|x| l.up_set_size(x)).collect()
}

/// Linear form given by its values on the basis `g_w e_L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceForm {
    values: HashMap<BasisKey, LaurentPoly>,
}

impl TraceForm {
    pub fn closed_form(alg: &Algebra) -> Self {
        let one = alg.group().identity();
        let values = zeta_counts(alg.lattice())
            .into_iter()
            .enumerate()
            .map(|(x, z)| ((one, x), LaurentPoly::constant(z as i64)))
            .collect();
        TraceForm { values }
    }

    /// Overrides the value on one basis element.
    pub fn with_value(mut self, key: BasisKey, value: LaurentPoly) -> Self {
        if value.is_zero() {
            self.values.remove(&key);
        } else {
            self.values.insert(key, value);
        }
        self
    }

    pub fn value(&self, key: BasisKey) -> LaurentPoly {
        self.values.get(&key).cloned().unwrap_or_else(LaurentPoly::zero)
    }

    pub fn apply(&self, a: &AlgElem) -> LaurentPoly {
        let mut acc = LaurentPoly::zero();
        for (k, c) in a.terms() {
            if let Some(v) = self.values.get(k) {
                acc += c * v;
            }
        }
        acc
    }
}

/// `t(a)` for the closed-form trace.
pub fn trace(alg: &Algebra, a: &AlgElem) -> LaurentPoly {
    TraceForm::closed_form(alg).apply(a)
}

/// Gram matrix `G[i][j] = t(b_i b_j)` in the order of [`Algebra::basis_keys`].
pub fn gram_matrix(alg: &Algebra, form: &TraceForm) -> Vec<Vec<LaurentPoly>> {
    let keys = alg.basis_keys();
    keys.iter()
        .map(|&(w, x)| {
            let a = AlgElem::basis(w, x);
            keys.iter().map(|&(v, y)| form.apply(&alg.multiply(&a, &AlgElem::basis(v, y)))).collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceReport {
    pub passed: bool,
    pub pairs: usize,
    pub failures: usize,
    pub witness: Option<String>,
}

/// `t(ab) = t(ba)` on all ordered basis pairs, read off a Gram matrix.
pub fn trace_property_from_gram(alg: &Algebra, gram: &[Vec<LaurentPoly>]) -> TraceReport {
    let keys = alg.basis_keys();
    let n = keys.len();
    let mut failures = 0;
    let mut witness = None;
    for i in 0..n {
        for j in i + 1..n {
            if gram[i][j] != gram[j][i] {
                failures += 2;
                if witness.is_none() {
                    witness = Some(format!(
                        "t({} · {}) = {} but t({} · {}) = {}",
                        alg.describe(keys[i]),
                        alg.describe(keys[j]),
                        gram[i][j],
                        alg.describe(keys[j]),
                        alg.describe(keys[i]),
                        gram[j][i]
                    ));
                }
            }
        }
    }
    TraceReport { passed: failures == 0, pairs: n * n, failures, witness }
}

pub fn check_trace_property(alg: &Algebra, form: &TraceForm) -> TraceReport {
    trace_property_from_gram(alg, &gram_matrix(alg, form))
}

/// Change of basis `g_w e_L → g_w ε_L`: `G' = Pᵀ G P` with `P` unitriangular,
/// so `det G' = det G`.
fn idempotent_gram(alg: &Algebra, gram: &[Vec<LaurentPoly>]) -> Vec<Vec<LaurentPoly>> {
    let l = alg.lattice();
    let nl = l.len();
    let n = gram.len();
    let mu = alg.moebius();
    // column j = (v, y) of P has entries μ(y, z) at rows (v, z)
    let p_col: Vec<Vec<(usize, i64)>> = (0..n)
        .map(|j| {
            let (v, y) = (j / nl, j % nl);
            (y..nl).filter(|&z| mu[y][z] != 0).map(|z| (v * nl + z, mu[y][z])).collect()
        })
        .collect();
    let gp: Vec<Vec<LaurentPoly>> = gram
        .iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    let mut acc = LaurentPoly::zero();
                    for &(r, c) in &p_col[j] {
                        if !row[r].is_zero() {
                            acc += row[r].scale(&BigInt::from(c));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = LaurentPoly::zero();
                    for &(r, c) in &p_col[i] {
                        if !gp[r][j].is_zero() {
                            acc += gp[r][j].scale(&BigInt::from(c));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn permutation_sign(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut odd = false;
    for i in 0..perm.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

/// Determinant of a sparse matrix as a signed product over the connected
/// components of its row/column incidence graph.
pub fn block_det(m: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let n = m.len();
    // union-find on rows 0..n and columns n..2n
    let mut parent: Vec<usize> = (0..2 * n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, row) in m.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if !e.is_zero() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, n + j));
                parent[a] = b;
            }
        }
    }
    let mut comps: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        comps.entry(r).or_default().0.push(i);
    }
    for j in 0..n {
        let r = find(&mut parent, n + j);
        comps.entry(r).or_default().1.push(j);
    }
    let mut row_order = Vec::with_capacity(n);
    let mut col_order = Vec::with_capacity(n);
    let mut det = LaurentPoly::one();
    for (rows, cols) in comps.values() {
        if rows.len() != cols.len() {
            return LaurentPoly::zero();
        }
        let sub: Vec<Vec<LaurentPoly>> = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect()).collect();
        let d = laurent::det(&sub).expect("square");
        if d.is_zero() {
            return LaurentPoly::zero();
        }
        det = &det * &d;
        row_order.extend(rows);
        col_order.extend(cols);
    }
    if permutation_sign(&row_order) != permutation_sign(&col_order) {
        -det
    } else {
        det
    }
}

/// Exact Gram determinant through the idempotent basis.
pub fn gram_det_from_gram(alg: &Algebra, gram: &[Vec<LaurentPoly>]) -> LaurentPoly {
    block_det(&idempotent_gram(alg, gram))
}

pub fn gram_det(alg: &Algebra, form: &TraceForm) -> LaurentPoly {
    gram_det_from_gram(alg, &gram_matrix(alg, form))
}

/// Determinant modulo `p` at the point `values` (each nonzero mod `p`).
pub fn det_mod_p(m: &[Vec<LaurentPoly>], p: u64, values: &[u64]) -> u64 {
    let n = m.len();
    let mut a: Vec<Vec<u64>> =
        m.iter().map(|row| row.iter().map(|e| e.specialize_mod(p, values).expect("nonzero values")).collect()).collect();
    let mut det: u128 = 1;
    let p128 = p as u128;
    for k in 0..n {
        let Some(r) = (k..n).find(|&r| a[r][k] != 0) else {
            return 0;
        };
        if r != k {
            a.swap(r, k);
            det = (p128 - det) % p128;
        }
        det = det * a[k][k] as u128 % p128;
        let inv = mod_inverse(a[k][k], p) as u128;
        for i in k + 1..n {
            if a[i][k] == 0 {
                continue;
            }
            let f = a[i][k] as u128 * inv % p128;
            for j in k..n {
                let sub = f * a[k][j] as u128 % p128;
                a[i][j] = ((a[i][j] as u128 + p128 - sub) % p128) as u64;
            }
        }
    }
    det as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpecializationReport {
    pub passed: bool,
    pub checked: usize,
    pub witness: Option<String>,
}

/// At `u_c = 1`, the closed-form trace of every basis element against the
/// block trace `Σ_X tr ⊗ t` computed through θ.
pub fn check_specialization_consistency(alg: &Algebra, form: &TraceForm) -> SpecializationReport {
    let w = alg.group();
    let l = alg.lattice();
    let theta = Theta::new(w, l);
    let ones = vec![BigRational::one(); alg.num_parameters()];
    let mut witness = None;
    let keys = alg.basis_keys();
    for &(g, x) in &keys {
        let direct = form.value((g, x)).specialize(&ones).expect("nonzero parameters");
        // g e_x = Σ_{y ≥ x} g ε_y, from inverting ε = Σ μ e
        let coeffs: Vec<BigRational> = (0..l.len())
            .map(|y| if l.leq(x, y) { BigRational::one() } else { BigRational::zero() })
            .collect();
        let img = theta.combination(w, (0..l.len()).filter(|&y| !coeffs[y].is_zero()).map(|y| (g, y, &coeffs[y])));
        let via_theta = img.block_trace(w);
        if direct != via_theta {
            witness = Some(format!("{}: closed form {direct}, block trace {via_theta}", alg.describe((g, x))));
            break;
        }
    }
    SpecializationReport { passed: witness.is_none(), checked: keys.len(), witness }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{CoxeterSystem, CoxeterType};
    use crate::lattice::{enumerate_l_2, enumerate_l_infinity};

    fn c(n: i64) -> LaurentPoly {
        LaurentPoly::constant(n)
    }

    #[test]
    fn a1_trace_and_gram() {
        let w = CoxeterSystem::new(CoxeterType::a(1));
        let l = enumerate_l_infinity(&w).unwrap();
        let alg = Algebra::new(&w, &l);
        let s = w.simple_element(0);
        let (triv, top) = (l.trivial(), l.top());
        assert_eq!(trace(&alg, &alg.e(triv)), c(2));
        assert_eq!(trace(&alg, &AlgElem::basis(s, triv)), c(0));
        let b = AlgElem::basis(s, triv);
        let u = LaurentPoly::var(0);
        assert_eq!(trace(&alg, &alg.multiply(&b, &b)), &u + &c(1));

        let form = TraceForm::closed_form(&alg);
        let order = [(w.identity(), triv), (w.identity(), top), (s, triv), (s, top)];
        let keys = alg.basis_keys();
        let g = gram_matrix(&alg, &form);
        let pos = |k: BasisKey| keys.iter().position(|&x| x == k).unwrap();
        let expected = [
            [c(2), c(1), c(0), c(0)],
            [c(1), c(1), c(0), c(0)],
            [c(0), c(0), &u + &c(1), u.clone()],
            [c(0), c(0), u.clone(), u.clone()],
        ];
        for (i, &a) in order.iter().enumerate() {
            for (j, &b) in order.iter().enumerate() {
                assert_eq!(g[pos(a)][pos(b)], expected[i][j]);
            }
        }
        assert_eq!(laurent::det(&g).unwrap(), u);
        assert_eq!(gram_det_from_gram(&alg, &g), u);
        let report = trace_property_from_gram(&alg, &g);
        assert!(report.passed);
        assert_eq!(report.pairs, 16);
    }

    #[test]
    fn block_det_matches_bareiss() {
        for ct in [CoxeterType::a(2), CoxeterType::b(2)] {
            let w = CoxeterSystem::new(ct);
            let l = enumerate_l_2(&w).unwrap();
            let alg = Algebra::new(&w, &l);
            let g = gram_matrix(&alg, &TraceForm::closed_form(&alg));
            let full = laurent::det(&g).unwrap();
            assert!(!full.is_zero());
            assert_eq!(gram_det_from_gram(&alg, &g), full, "{ct}");
        }
    }

    #[test]
    fn block_det_sign() {
        let m = vec![vec![c(0), c(2)], vec![c(3), c(0)]];
        assert_eq!(block_det(&m), c(-6));
        let m = vec![vec![c(0), c(0), c(1)], vec![c(0), c(1), c(0)], vec![c(1), c(0), c(0)]];
        assert_eq!(block_det(&m), laurent::det(&m).unwrap());
        let m = vec![vec![c(1), c(1)], vec![c(0), c(0)]];
        assert!(block_det(&m).is_zero());
    }

    #[test]
    fn det_mod_p_agrees() {
        let u = LaurentPoly::var(0);
        let m = vec![vec![&u + &c(1), u.clone()], vec![u.clone(), u.clone()]];
        assert_eq!(det_mod_p(&m, 101, &[5]), 5);
        assert_eq!(det_mod_p(&[vec![c(2), c(4)], vec![c(1), c(2)]], 7, &[1]), 0);
    }

    #[test]
    fn a2_trace_property_and_specialization() {
        let w = CoxeterSystem::new(CoxeterType::a(2));
        let l = enumerate_l_infinity(&w).unwrap();
        let alg = Algebra::new(&w, &l);
        let form = TraceForm::closed_form(&alg);
        let r = check_trace_property(&alg, &form);
        assert!(r.passed, "{:?}", r.witness);
        assert_eq!(r.pairs, 900);
        assert!(check_specialization_consistency(&alg, &form).passed);
        for x in 0..l.len() {
            if l.set(x).len() == 1 {
                assert_eq!(trace(&alg, &alg.e(x)), c(2));
            }
        }
    }

    #[test]
    fn perturbed_trace_fails() {
        // C(A1, L) is commutative, so the control needs a larger group
        let w = CoxeterSystem::new(CoxeterType::a(2));
        let l = enumerate_l_infinity(&w).unwrap();
        let alg = Algebra::new(&w, &l);
        let form = TraceForm::closed_form(&alg).with_value((w.simple_element(0), l.top()), c(1));
        let r = check_trace_property(&alg, &form);
        assert!(!r.passed);
        assert!(r.witness.is_some());
        assert!(!check_specialization_consistency(&alg, &form).passed);
    }
}
