//! The algebra `C(W, L)` on the basis `g_w e_L`.
//!
//! The algebra is defined through its left regular representation: left
//! multiplication by `e_L` and by the generators `g_s` are given by explicit
//! rewriting rules on basis vectors, and products of arbitrary elements are
//! reduced to those. The defining relations are then checked rather than
//! assumed, see [`Algebra::verify_relations`].
//!
//! Parameters are one Laurent variable `u_c` per conjugacy class `c` of
//! reflections, `u1` being the class with index 0.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::coxeter::{CoxeterSystem, ElemId};
use crate::lattice::SubgroupLattice;
use crate::laurent::LaurentPoly;
use crate::linalg;
use crate::moebius;

/// Basis index `(w, L)` of `g_w e_L`.
pub type BasisKey = (ElemId, usize);

/// Variant of the descent rule, for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Standard,
    /// Omits the join in the `g_{w'}` term of the descent rule.
    DropJoinTerm,
}

/// Finitely supported map `(w, L) ↦ coefficient` with no zero entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlgElem {
    terms: BTreeMap<BasisKey, LaurentPoly>,
}

impl AlgElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(w: ElemId, l: usize) -> Self {
        Self::term((w, l), LaurentPoly::one())
    }

    pub fn term(key: BasisKey, c: LaurentPoly) -> Self {
        let mut a = Self::zero();
        a.add_term(key, c);
        a
    }

    pub fn terms(&self) -> &BTreeMap<BasisKey, LaurentPoly> {
        &self.terms
    }

    pub fn coeff(&self, key: BasisKey) -> LaurentPoly {
        self.terms.get(&key).cloned().unwrap_or_else(LaurentPoly::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: BasisKey, c: LaurentPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add_assign(&mut self, other: &AlgElem) {
        for (&k, c) in &other.terms {
            self.add_term(k, c.clone());
        }
    }

    pub fn add(&self, other: &AlgElem) -> AlgElem {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &AlgElem) -> AlgElem {
        let mut out = self.clone();
        for (&k, c) in &other.terms {
            out.add_term(k, -c);
        }
        out
    }

    pub fn scale(&self, c: &LaurentPoly) -> AlgElem {
        let mut out = AlgElem::zero();
        for (&k, a) in &self.terms {
            out.add_term(k, c * a);
        }
        out
    }

    /// Coefficients at the given parameter values.
    pub fn specialize(&self, values: &[BigRational]) -> BTreeMap<BasisKey, BigRational> {
        self.terms
            .iter()
            .map(|(&k, c)| (k, c.specialize(values).expect("nonzero parameters")))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }
}

/// Classical Hecke algebra element on the `T_w` basis.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HeckeElem {
    terms: BTreeMap<ElemId, LaurentPoly>,
}

impl HeckeElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(w: ElemId) -> Self {
        let mut h = Self::zero();
        h.add_term(w, LaurentPoly::one());
        h
    }

    pub fn terms(&self) -> &BTreeMap<ElemId, LaurentPoly> {
        &self.terms
    }

    pub fn coeff(&self, w: ElemId) -> LaurentPoly {
        self.terms.get(&w).cloned().unwrap_or_else(LaurentPoly::zero)
    }

    pub fn add_term(&mut self, w: ElemId, c: LaurentPoly) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(w).or_insert_with(LaurentPoly::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }
}

/// Result of one relation family in [`Algebra::verify_relations`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub passed: bool,
    pub tested: usize,
    pub witness: Option<String>,
}

/// Per-orbit line of [`Algebra::block_dimension_report`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockRow {
    pub representative: usize,
    pub subgroup_type: String,
    pub orbit_size: usize,
    pub stabilizer_order: usize,
    pub contribution: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockReport {
    pub rows: Vec<BlockRow>,
    pub total: usize,
    pub expected_total: usize,
}

/// Result of the Peirce checks in [`Algebra::check_peirce`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeirceReport {
    pub passed: bool,
    pub pairs_checked: usize,
    pub dimension_total: usize,
    pub failures: Vec<String>,
}

/// `C(W, L)` for a fixed group, lattice and rule variant.
pub struct Algebra<'a> {
    w: &'a CoxeterSystem,
    l: &'a SubgroupLattice,
    rule: Rule,
    /// `u_c - 1` and `u_c` for the class of each simple reflection.
    qm1: Vec<LaurentPoly>,
    q: Vec<LaurentPoly>,
    cyclic: Vec<usize>,
    /// `act[g][x] = g·x`.
    act: Vec<Vec<u32>>,
    words: Vec<Vec<usize>>,
    mu: Vec<Vec<i64>>,
}

impl<'a> Algebra<'a> {
    pub fn new(w: &'a CoxeterSystem, l: &'a SubgroupLattice) -> Self {
        Self::with_rule(w, l, Rule::Standard)
    }

    pub fn with_rule(w: &'a CoxeterSystem, l: &'a SubgroupLattice, rule: Rule) -> Self {
        let q: Vec<LaurentPoly> =
            (0..w.rank()).map(|s| LaurentPoly::var(w.class_of(w.simple_reflection(s)))).collect();
        let qm1 = q.iter().map(|u| u - &LaurentPoly::one()).collect();
        let cyclic = (0..w.num_reflections()).map(|t| l.cyclic(t)).collect();
        let act = (0..w.order()).map(|g| (0..l.len()).map(|x| l.act(w, g, x) as u32).collect()).collect();
        let words = (0..w.order()).map(|g| w.reduced_word(g)).collect();
        let mu = moebius::moebius_function(l);
        Algebra { w, l, rule, qm1, q, cyclic, act, words, mu }
    }

    pub fn group(&self) -> &CoxeterSystem {
        self.w
    }

    pub fn lattice(&self) -> &SubgroupLattice {
        self.l
    }

    pub fn dimension(&self) -> usize {
        self.w.order() * self.l.len()
    }

    /// Number of parameters `u_c`.
    pub fn num_parameters(&self) -> usize {
        self.w.num_classes()
    }

    pub fn basis_keys(&self) -> Vec<BasisKey> {
        (0..self.w.order()).flat_map(|g| (0..self.l.len()).map(move |x| (g, x))).collect()
    }

    pub fn act(&self, g: ElemId, x: usize) -> usize {
        self.act[g][x] as usize
    }

    pub fn one(&self) -> AlgElem {
        AlgElem::basis(self.w.identity(), self.l.trivial())
    }

    pub fn e(&self, x: usize) -> AlgElem {
        AlgElem::basis(self.w.identity(), x)
    }

    pub fn g(&self, w: ElemId) -> AlgElem {
        AlgElem::basis(w, self.l.trivial())
    }

    /// `ε_x = Σ_{y ≥ x} μ(x, y) e_y`.
    pub fn epsilon(&self, x: usize) -> AlgElem {
        let mut a = AlgElem::zero();
        for y in x..self.l.len() {
            if self.mu[x][y] != 0 {
                a.add_term((self.w.identity(), y), LaurentPoly::constant(self.mu[x][y]));
            }
        }
        a
    }

    pub fn moebius(&self) -> &[Vec<i64>] {
        &self.mu
    }

    /// Left multiplication by `e_L`: `e_L g_w e_M = g_w e_{w^{-1}(L) ∨ M}`.
    pub fn mult_e(&self, x: usize, a: &AlgElem) -> AlgElem {
        let mut out = AlgElem::zero();
        for (&(g, m), c) in &a.terms {
            let lx = self.act(self.w.inv(g), x);
            out.add_term((g, self.l.join(lx, m)), c.clone());
        }
        out
    }

    /// Left multiplication by `g_s`.
    pub fn mult_g(&self, s: usize, a: &AlgElem) -> AlgElem {
        let w = self.w;
        let mut out = AlgElem::zero();
        for (&(g, m), c) in &a.terms {
            let sg = w.left_mul_simple(s, g);
            if w.length(sg) > w.length(g) {
                out.add_term((sg, m), c.clone());
                continue;
            }
            // g = s·sg; the reflection s^g = g^{-1} s g equals sg^{-1} s sg
            let t = w.conjugate_reflection(w.inv(g), w.simple_reflection(s));
            let j = self.l.join(self.cyclic[t], m);
            let cq = c * &self.qm1[s];
            out.add_term((sg, m), c.clone());
            match self.rule {
                Rule::Standard => out.add_term((sg, j), cq.clone()),
                Rule::DropJoinTerm => out.add_term((sg, m), cq.clone()),
            }
            out.add_term((g, j), cq);
        }
        out
    }

    /// Left multiplication by `g_{s_1} ⋯ g_{s_k}`, applied right to left.
    pub fn mult_word(&self, word: &[usize], a: &AlgElem) -> AlgElem {
        word.iter().rev().fold(a.clone(), |acc, &s| self.mult_g(s, &acc))
    }

    /// `(g_v e_L) · b` along the given word for `v`.
    pub fn mult_basis_along(&self, word: &[usize], x: usize, b: &AlgElem) -> AlgElem {
        self.mult_word(word, &self.mult_e(x, b))
    }

    pub fn multiply(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        let mut out = AlgElem::zero();
        for (&(v, x), c) in &a.terms {
            let p = self.mult_basis_along(&self.words[v], x, b);
            if c.is_one() {
                out.add_assign(&p);
            } else {
                out.add_assign(&p.scale(c));
            }
        }
        out
    }

    pub fn describe(&self, key: BasisKey) -> String {
        let (g, x) = key;
        let word: String = if self.words[g].is_empty() {
            "1".into()
        } else {
            self.words[g].iter().map(|s| format!("s{}", s + 1)).collect()
        };
        format!("g_{word} e_{:?}", self.l.set(x))
    }

    /// Checks the defining relations as identities of left-multiplication
    /// operators on every basis vector.
    pub fn verify_relations(&self) -> Vec<RelationCheck> {
        let keys = self.basis_keys();
        let w = self.w;
        let l = self.l;
        let mut out = Vec::new();

        let mut witness = None;
        let mut tested = 0;
        'quad: for s in 0..w.rank() {
            let es = self.cyclic[w.simple_reflection(s)];
            for &k in &keys {
                tested += 1;
                let b = AlgElem::basis(k.0, k.1);
                let gb = self.mult_g(s, &b);
                let lhs = self.mult_g(s, &gb);
                let rhs = b.add(&self.mult_e(es, &b.add(&gb)).scale(&self.qm1[s]));
                if lhs != rhs {
                    witness = Some(format!("s{} on {}", s + 1, self.describe(k)));
                    break 'quad;
                }
            }
        }
        out.push(RelationCheck { relation: "quadratic".into(), passed: witness.is_none(), tested, witness });

        let mut witness = None;
        let mut tested = 0;
        'braid: for s in 0..w.rank() {
            for t in s + 1..w.rank() {
                let m = w.coxeter_matrix()[s][t] as usize;
                let left: Vec<usize> = (0..m).map(|i| if i % 2 == 0 { s } else { t }).collect();
                let right: Vec<usize> = (0..m).map(|i| if i % 2 == 0 { t } else { s }).collect();
                for &k in &keys {
                    tested += 1;
                    let b = AlgElem::basis(k.0, k.1);
                    if self.mult_word(&left, &b) != self.mult_word(&right, &b) {
                        witness = Some(format!("s{} s{} on {}", s + 1, t + 1, self.describe(k)));
                        break 'braid;
                    }
                }
            }
        }
        out.push(RelationCheck { relation: "braid".into(), passed: witness.is_none(), tested, witness });

        let mut witness = None;
        let mut tested = 0;
        'equi: for s in 0..w.rank() {
            let se = w.simple_element(s);
            for x in 0..l.len() {
                let sx = self.act(se, x);
                for &k in &keys {
                    tested += 1;
                    let b = AlgElem::basis(k.0, k.1);
                    if self.mult_g(s, &self.mult_e(x, &b)) != self.mult_e(sx, &self.mult_g(s, &b)) {
                        witness = Some(format!("s{} with e_{:?} on {}", s + 1, l.set(x), self.describe(k)));
                        break 'equi;
                    }
                }
            }
        }
        out.push(RelationCheck { relation: "equivariance".into(), passed: witness.is_none(), tested, witness });

        let mut witness = None;
        let mut tested = 0;
        'mob: for x in 0..l.len() {
            for y in 0..l.len() {
                let j = l.join(x, y);
                for &k in &keys {
                    tested += 1;
                    let b = AlgElem::basis(k.0, k.1);
                    if self.mult_e(x, &self.mult_e(y, &b)) != self.mult_e(j, &b) {
                        witness = Some(format!("e_{:?} e_{:?} on {}", l.set(x), l.set(y), self.describe(k)));
                        break 'mob;
                    }
                }
            }
        }
        out.push(RelationCheck { relation: "moebius".into(), passed: witness.is_none(), tested, witness });
        out
    }

    /// `T_s T_w = T_{sw}` on ascents, `(u_s - 1) T_w + u_s T_{sw}` on descents.
    pub fn hecke_mult_simple(&self, s: usize, h: &HeckeElem) -> HeckeElem {
        let mut out = HeckeElem::zero();
        for (&g, c) in &h.terms {
            let sg = self.w.left_mul_simple(s, g);
            if self.w.length(sg) > self.w.length(g) {
                out.add_term(sg, c.clone());
            } else {
                out.add_term(g, c * &self.qm1[s]);
                out.add_term(sg, c * &self.q[s]);
            }
        }
        out
    }

    pub fn hecke_multiply(&self, a: &HeckeElem, b: &HeckeElem) -> HeckeElem {
        let mut out = HeckeElem::zero();
        for (&v, c) in &a.terms {
            let p = self.words[v].iter().rev().fold(b.clone(), |acc, &s| self.hecke_mult_simple(s, &acc));
            for (&g, d) in &p.terms {
                out.add_term(g, c * d);
            }
        }
        out
    }

    /// `g_w e_L ↦ T_w`.
    pub fn project_to_hecke(&self, a: &AlgElem) -> HeckeElem {
        let mut out = HeckeElem::zero();
        for (&(g, _), c) in &a.terms {
            out.add_term(g, c.clone());
        }
        out
    }

    /// `T_w ↦ g_w e_W`.
    pub fn split_from_hecke(&self, h: &HeckeElem) -> AlgElem {
        let mut out = AlgElem::zero();
        for (&g, c) in &h.terms {
            out.add_term((g, self.l.top()), c.clone());
        }
        out
    }

    /// Spanning vectors of `C ε_y`: distinct nonzero `(g_w e_L) ε_y`.
    fn right_ideal_span(&self, y: usize) -> Vec<AlgElem> {
        let ey = self.epsilon(y);
        let mut heads: Vec<AlgElem> = Vec::new();
        for x in 0..self.l.len() {
            let h = self.mult_e(x, &ey);
            if !h.is_zero() && !heads.contains(&h) {
                heads.push(h);
            }
        }
        let mut out: Vec<AlgElem> = Vec::new();
        for h in &heads {
            for g in 0..self.w.order() {
                let v = self.mult_word(&self.words[g], h);
                if !v.is_zero() && !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    /// Spanning set of `ε_x C ε_y`, reduced to linearly independent vectors.
    pub fn peirce_block(&self, x: usize, y: usize) -> Vec<AlgElem> {
        let ex = self.epsilon(x);
        let span: Vec<AlgElem> = self.right_ideal_span(y).iter().map(|v| self.multiply(&ex, v)).collect();
        self.independent_subset(span)
    }

    fn parameter_point(&self) -> Vec<BigRational> {
        // coefficients here are integers; the point only matters otherwise
        const PRIMES: [i64; 6] = [2, 3, 5, 7, 11, 13];
        (0..self.num_parameters()).map(|k| BigRational::from_integer(PRIMES[k % 6].into())).collect()
    }

    fn independent_subset(&self, vs: Vec<AlgElem>) -> Vec<AlgElem> {
        let point = self.parameter_point();
        let mut cols: HashMap<BasisKey, usize> = HashMap::new();
        for v in &vs {
            for &k in v.terms.keys() {
                let n = cols.len();
                cols.entry(k).or_insert(n);
            }
        }
        let mut chosen: Vec<AlgElem> = Vec::new();
        let mut rows: Vec<Vec<BigRational>> = Vec::new();
        for v in vs {
            if v.is_zero() {
                continue;
            }
            let mut row = vec![BigRational::zero(); cols.len()];
            for (k, c) in v.specialize(&point) {
                row[cols[&k]] = c;
            }
            rows.push(row);
            if linalg::rank(&rows) == rows.len() {
                chosen.push(v);
            } else {
                rows.pop();
            }
        }
        chosen
    }

    /// Peirce decomposition checks: block dimensions, total, corner closure
    /// with identity `ε_x`, and orthogonality `ε_x C ε_y · ε_{y'} = 0`.
    pub fn check_peirce(&self) -> PeirceReport {
        let w = self.w;
        let l = self.l;
        let n = l.len();
        let mut failures = Vec::new();
        let mut total = 0;
        let mut pairs = 0;
        let eps: Vec<AlgElem> = (0..n).map(|x| self.epsilon(x)).collect();
        let spans: Vec<Vec<AlgElem>> = (0..n).map(|y| self.right_ideal_span(y)).collect();
        for x in 0..n {
            for y in 0..n {
                pairs += 1;
                let block = self.independent_subset(spans[y].iter().map(|v| self.multiply(&eps[x], v)).collect());
                let expected = (0..w.order()).filter(|&g| self.act(g, y) == x).count();
                total += block.len();
                if block.len() != expected {
                    failures.push(format!("dim ε C ε at ({x}, {y}) is {} not {expected}", block.len()));
                }
                for a in &block {
                    for (y2, e2) in eps.iter().enumerate() {
                        let p = self.multiply(a, e2);
                        let ok = if y2 == y { p == *a } else { p.is_zero() };
                        if !ok {
                            failures.push(format!("orthogonality fails at ({x}, {y}) against {y2}"));
                        }
                    }
                }
                if x == y && l.orbits()[l.orbit_of(x)].representative == x {
                    for a in &block {
                        if self.multiply(&eps[x], a) != *a {
                            failures.push(format!("ε_{x} is not a left identity on its corner"));
                        }
                        for b in &block {
                            let p = self.multiply(a, b);
                            if self.multiply(&self.multiply(&eps[x], &p), &eps[x]) != p {
                                failures.push(format!("corner at {x} not closed"));
                            }
                        }
                    }
                }
            }
        }
        let expected_total = self.dimension();
        if total != expected_total {
            failures.push(format!("block dimensions sum to {total}, expected {expected_total}"));
        }
        failures.dedup();
        PeirceReport { passed: failures.is_empty(), pairs_checked: pairs, dimension_total: total, failures }
    }

    /// Orbit table `|X|`, `|G_{x_*}|` and `|X|²·|G_{x_*}|`.
    pub fn block_dimension_report(&self) -> BlockReport {
        let w = self.w;
        let rows: Vec<BlockRow> = self
            .l
            .orbits()
            .iter()
            .map(|o| {
                let r = o.representative;
                let stab = (0..w.order()).filter(|&g| self.act(g, r) == r).count();
                BlockRow {
                    representative: r,
                    subgroup_type: w.subgroup_type(&self.l.set(r).to_vec()),
                    orbit_size: o.members.len(),
                    stabilizer_order: stab,
                    contribution: o.members.len() * o.members.len() * stab,
                }
            })
            .collect();
        let total = rows.iter().map(|r| r.contribution).sum();
        BlockReport { rows, total, expected_total: self.dimension() }
    }

    /// Corner at the trivial subgroup behaves like `kW`:
    /// `(g_s ε_⊥)² = ε_⊥` and braid relations hold.
    pub fn check_group_corner(&self) -> bool {
        let e0 = self.epsilon(self.l.trivial());
        let gens: Vec<AlgElem> = (0..self.w.rank())
            .map(|s| self.multiply(&self.g(self.w.simple_element(s)), &e0))
            .collect();
        gens.iter().all(|a| self.multiply(a, a) == e0) && self.corner_braids(&gens, &e0)
    }

    /// Corner at `W` behaves like the Hecke algebra:
    /// `(g_s e_W)² = (u_s - 1) g_s e_W + u_s e_W` and braid relations hold.
    pub fn check_hecke_corner(&self) -> bool {
        let top = self.l.top();
        let et = self.epsilon(top);
        let gens: Vec<AlgElem> = (0..self.w.rank())
            .map(|s| AlgElem::basis(self.w.simple_element(s), top))
            .collect();
        let quad = gens.iter().enumerate().all(|(s, a)| {
            let rhs = a.scale(&self.qm1[s]).add(&et.scale(&self.q[s]));
            self.multiply(a, a) == rhs
        });
        quad && self.corner_braids(&gens, &et)
    }

    fn corner_braids(&self, gens: &[AlgElem], unit: &AlgElem) -> bool {
        let n = gens.len();
        for s in 0..n {
            for t in s + 1..n {
                let m = self.w.coxeter_matrix()[s][t] as usize;
                let mut a = unit.clone();
                let mut b = unit.clone();
                for i in 0..m {
                    let (x, y) = if i % 2 == 0 { (s, t) } else { (t, s) };
                    a = self.multiply(&a, &gens[x]);
                    b = self.multiply(&b, &gens[y]);
                }
                if a != b {
                    return false;
                }
            }
        }
        true
    }

    /// At `u_c = 1`, compares every structure constant with
    /// `(w e_L)(v e_M) = wv e_{v^{-1}(L) ∨ M}`; returns the first mismatch.
    pub fn check_semidirect_specialization(&self) -> Option<(BasisKey, BasisKey)> {
        let ones = vec![BigRational::one(); self.num_parameters()];
        let keys = self.basis_keys();
        for &(w1, x) in &keys {
            let a = AlgElem::basis(w1, x);
            for &(v, m) in &keys {
                let p = self.multiply(&a, &AlgElem::basis(v, m)).specialize(&ones);
                let k = (self.w.mul(w1, v), self.l.join(self.act(self.w.inv(v), x), m));
                let expected: BTreeMap<BasisKey, BigRational> = [(k, BigRational::one())].into_iter().collect();
                if p != expected {
                    return Some(((w1, x), (v, m)));
                }
            }
        }
        None
    }
}
