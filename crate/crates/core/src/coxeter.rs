//! Finite Coxeter groups of types A, B, D and I2(m) in concrete permutation
//! models.
//!
//! Every group is enumerated once at construction. Elements are then referred
//! to by dense indices ([`ElemId`]) into the enumeration, with the identity at
//! index 0, and reflections by indices ([`ReflectionId`]) into the reflection
//! list. Each reflection carries exactly one positive root, so hyperplanes and
//! reflections are the same thing throughout the crate.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a group element in [`CoxeterSystem::elements`].
pub type ElemId = usize;
/// Index of a reflection in [`CoxeterSystem::reflections`].
pub type ReflectionId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("invalid Coxeter type: {0}")]
    InvalidType(String),
    #[error("group elements come from different models")]
    ModelMismatch,
    #[error("element does not belong to this group")]
    ForeignElement,
    #[error("reflection index {0} out of range")]
    BadReflection(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    D,
    I2,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::D => "D",
            Family::I2 => "I2",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Family {
    type Err = CoxeterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "D" | "d" => Ok(Family::D),
            "I2" | "i2" => Ok(Family::I2),
            other => Err(CoxeterError::InvalidType(format!("unknown family {other:?}"))),
        }
    }
}

/// A validated Coxeter type. `m` is only present for `I2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoxeterType {
    family: Family,
    rank: usize,
    m: Option<u32>,
}

impl CoxeterType {
    pub fn new(family: Family, rank: usize, m: Option<u32>) -> Result<Self, CoxeterError> {
        let bad = |msg: String| Err(CoxeterError::InvalidType(msg));
        match family {
            Family::A if rank < 1 => return bad("A requires rank >= 1".into()),
            Family::B if rank < 2 => return bad("B requires rank >= 2".into()),
            Family::D if rank < 2 => return bad("D requires rank >= 2".into()),
            Family::I2 => {
                if rank != 2 {
                    return bad("I2 requires rank 2".into());
                }
                match m {
                    Some(m) if m >= 3 => {}
                    _ => return bad("I2 requires m >= 3".into()),
                }
            }
            _ => {}
        }
        if family != Family::I2 && m.is_some() {
            return bad(format!("m is only meaningful for I2, got {family}"));
        }
        if family != Family::I2 && rank > 127 {
            return bad("rank too large for the permutation model".into());
        }
        Ok(CoxeterType { family, rank, m })
    }

    pub fn a(rank: usize) -> Self {
        Self::new(Family::A, rank, None).expect("valid A type")
    }

    pub fn b(rank: usize) -> Self {
        Self::new(Family::B, rank, None).expect("valid B type")
    }

    pub fn d(rank: usize) -> Self {
        Self::new(Family::D, rank, None).expect("valid D type")
    }

    pub fn i2(m: u32) -> Self {
        Self::new(Family::I2, 2, Some(m)).expect("valid I2 type")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn m(&self) -> Option<u32> {
        self.m
    }

    /// Types with an integral root system: A, B, D and I2(m) for m in {3, 4, 6}.
    pub fn is_crystallographic(&self) -> bool {
        match self.family {
            Family::I2 => matches!(self.m, Some(3) | Some(4) | Some(6)),
            _ => true,
        }
    }
}

impl fmt::Display for CoxeterType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::I2 => write!(f, "I2({})", self.m.unwrap_or(0)),
            fam => write!(f, "{fam}{}", self.rank),
        }
    }
}

/// A group element in its concrete model.
///
/// * `Perm`: permutation of `n + 1` points for `A_n`, `p[k]` is the image of `k`.
/// * `Signed`: signed permutation for `B_n` and `D_n`; entry `k` is `±(j + 1)`
///   when `e_{k+1} ↦ ±e_{j+1}`.
/// * `Dihedral`: `θ ↦ ±θ + 2π·rot/m`, the sign being negative when `flip` is set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Perm(Vec<u8>),
    Signed(Vec<i8>),
    Dihedral { m: u32, rot: u32, flip: bool },
}

impl GroupElement {
    fn compose(&self, other: &GroupElement) -> Result<GroupElement, CoxeterError> {
        match (self, other) {
            (GroupElement::Perm(a), GroupElement::Perm(b)) if a.len() == b.len() => {
                Ok(GroupElement::Perm(b.iter().map(|&k| a[k as usize]).collect()))
            }
            (GroupElement::Signed(a), GroupElement::Signed(b)) if a.len() == b.len() => {
                Ok(GroupElement::Signed(
                    b.iter()
                        .map(|&img| {
                            let inner = a[(img.unsigned_abs() - 1) as usize];
                            if img < 0 {
                                -inner
                            } else {
                                inner
                            }
                        })
                        .collect(),
                ))
            }
            (
                GroupElement::Dihedral { m, rot: r1, flip: f1 },
                GroupElement::Dihedral { m: m2, rot: r2, flip: f2 },
            ) if m == m2 => {
                let r2_signed = if *f1 { (m - r2) % m } else { *r2 };
                Ok(GroupElement::Dihedral {
                    m: *m,
                    rot: (r1 + r2_signed) % m,
                    flip: f1 ^ f2,
                })
            }
            _ => Err(CoxeterError::ModelMismatch),
        }
    }

    fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Perm(p) => {
                let mut inv = vec![0u8; p.len()];
                for (k, &img) in p.iter().enumerate() {
                    inv[img as usize] = k as u8;
                }
                GroupElement::Perm(inv)
            }
            GroupElement::Signed(p) => {
                let mut inv = vec![0i8; p.len()];
                for (k, &img) in p.iter().enumerate() {
                    let sign = img.signum();
                    inv[(img.unsigned_abs() - 1) as usize] = sign * (k as i8 + 1);
                }
                GroupElement::Signed(inv)
            }
            GroupElement::Dihedral { m, rot, flip } => {
                if *flip {
                    self.clone()
                } else {
                    GroupElement::Dihedral { m: *m, rot: (m - rot) % m, flip: false }
                }
            }
        }
    }

    /// Number of coordinates whose sign is reversed (signed model only).
    pub fn sign_changes(&self) -> usize {
        match self {
            GroupElement::Signed(p) => p.iter().filter(|&&x| x < 0).count(),
            _ => 0,
        }
    }
}

/// Root in the model: coordinate vector for A/B/D, direction index for I2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum ModelRoot {
    Vector(Vec<i64>),
    Index(u32),
}

impl ModelRoot {
    fn is_positive(&self, m: u32) -> bool {
        match self {
            ModelRoot::Vector(v) => v.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0),
            ModelRoot::Index(i) => *i < m,
        }
    }
}

fn act_on_root(w: &GroupElement, r: &ModelRoot) -> ModelRoot {
    match (w, r) {
        (GroupElement::Perm(p), ModelRoot::Vector(v)) => {
            let mut out = vec![0; v.len()];
            for (k, &c) in v.iter().enumerate() {
                out[p[k] as usize] = c;
            }
            ModelRoot::Vector(out)
        }
        (GroupElement::Signed(p), ModelRoot::Vector(v)) => {
            let mut out = vec![0; v.len()];
            for (k, &c) in v.iter().enumerate() {
                let img = p[k];
                out[(img.unsigned_abs() - 1) as usize] = if img < 0 { -c } else { c };
            }
            ModelRoot::Vector(out)
        }
        (GroupElement::Dihedral { m, rot, flip }, ModelRoot::Index(i)) => {
            // roots sit at angles iπ/m + π/2, i in 0..2m
            let two_m = 2 * m;
            let img = if *flip {
                (2 * rot + 3 * two_m - i - m) % two_m
            } else {
                (i + 2 * rot) % two_m
            };
            ModelRoot::Index(img)
        }
        _ => unreachable!("root and element from different models"),
    }
}

/// Reflection in the model attached to a positive root.
fn model_reflection(ctype: &CoxeterType, root: &ModelRoot) -> GroupElement {
    match (ctype.family, root) {
        (Family::A, ModelRoot::Vector(v)) => {
            let mut p: Vec<u8> = (0..v.len() as u8).collect();
            let i = v.iter().position(|&c| c == 1).unwrap();
            let j = v.iter().position(|&c| c == -1).unwrap();
            p.swap(i, j);
            GroupElement::Perm(p)
        }
        (Family::B | Family::D, ModelRoot::Vector(v)) => {
            let mut p: Vec<i8> = (1..=v.len() as i8).collect();
            let support: Vec<usize> = (0..v.len()).filter(|&k| v[k] != 0).collect();
            match support.as_slice() {
                [i] => p[*i] = -p[*i],
                [i, j] => {
                    let (i, j) = (*i, *j);
                    if v[i] == v[j] {
                        // e_i + e_j: e_i ↦ -e_j, e_j ↦ -e_i
                        p[i] = -(j as i8 + 1);
                        p[j] = -(i as i8 + 1);
                    } else {
                        p[i] = j as i8 + 1;
                        p[j] = i as i8 + 1;
                    }
                }
                _ => unreachable!("not a root of type B/D"),
            }
            GroupElement::Signed(p)
        }
        (Family::I2, ModelRoot::Index(i)) => GroupElement::Dihedral {
            m: ctype.m.unwrap(),
            rot: *i % ctype.m.unwrap(),
            flip: true,
        },
        _ => unreachable!("root and type mismatch"),
    }
}

fn unit(n: usize, k: usize, c: i64) -> Vec<i64> {
    let mut v = vec![0; n];
    v[k] = c;
    v
}

fn add_vec(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Positive roots and simple roots of the model, simple roots first in
/// Dynkin order.
fn model_roots(ctype: &CoxeterType) -> (Vec<ModelRoot>, Vec<ModelRoot>) {
    let n = ctype.rank;
    let mut simple = Vec::new();
    let mut positive = Vec::new();
    match ctype.family {
        Family::A => {
            let dim = n + 1;
            for i in 0..n {
                simple.push(ModelRoot::Vector(add_vec(&unit(dim, i, 1), &unit(dim, i + 1, -1))));
            }
            for i in 0..dim {
                for j in i + 1..dim {
                    positive.push(ModelRoot::Vector(add_vec(&unit(dim, i, 1), &unit(dim, j, -1))));
                }
            }
        }
        Family::B | Family::D => {
            for i in 0..n - 1 {
                simple.push(ModelRoot::Vector(add_vec(&unit(n, i, 1), &unit(n, i + 1, -1))));
            }
            if ctype.family == Family::B {
                simple.push(ModelRoot::Vector(unit(n, n - 1, 1)));
                for i in 0..n {
                    positive.push(ModelRoot::Vector(unit(n, i, 1)));
                }
            } else {
                simple.push(ModelRoot::Vector(add_vec(&unit(n, n - 2, 1), &unit(n, n - 1, 1))));
            }
            for i in 0..n {
                for j in i + 1..n {
                    positive.push(ModelRoot::Vector(add_vec(&unit(n, i, 1), &unit(n, j, -1))));
                    positive.push(ModelRoot::Vector(add_vec(&unit(n, i, 1), &unit(n, j, 1))));
                }
            }
        }
        Family::I2 => {
            let m = ctype.m.unwrap();
            simple.push(ModelRoot::Index(0));
            simple.push(ModelRoot::Index(m - 1));
            positive.extend((0..m).map(ModelRoot::Index));
        }
    }
    positive.sort_by(|a, b| match (a, b) {
        (ModelRoot::Vector(x), ModelRoot::Vector(y)) => y.cmp(x),
        (ModelRoot::Index(x), ModelRoot::Index(y)) => x.cmp(y),
        _ => std::cmp::Ordering::Equal,
    });
    (simple, positive)
}

/// Integer root coordinates for I2(m), m ∈ {3, 4, 6}, in the basis of simple
/// roots, obtained by transporting the simple roots with the Cartan matrix.
fn dihedral_root_coordinates(m: u32, simple: &[GroupElement]) -> HashMap<u32, Vec<i64>> {
    let k = match m {
        3 => 1,
        4 => 2,
        6 => 3,
        _ => unreachable!(),
    };
    // cartan[i][j] = <α_i, α_j^∨>
    let cartan = [[2i64, -1], [-k, 2]];
    let mut coords: HashMap<u32, Vec<i64>> = HashMap::new();
    let mut queue = VecDeque::new();
    for (idx, start) in [(0u32, vec![1i64, 0]), (m - 1, vec![0, 1])] {
        coords.insert(idx, start.clone());
        queue.push_back((idx, start));
    }
    while let Some((idx, v)) = queue.pop_front() {
        for (j, s) in simple.iter().enumerate() {
            let ModelRoot::Index(img) = act_on_root(s, &ModelRoot::Index(idx)) else {
                unreachable!()
            };
            let pairing: i64 = (0..2).map(|i| v[i] * cartan[i][j]).sum();
            let mut w = v.clone();
            w[j] -= pairing;
            match coords.get(&img) {
                Some(existing) => assert_eq!(existing, &w, "inconsistent dihedral root data"),
                None => {
                    coords.insert(img, w.clone());
                    queue.push_back((img, w));
                }
            }
        }
    }
    coords
}

/// A finite Coxeter group, fully enumerated.
#[derive(Debug, Clone)]
pub struct CoxeterSystem {
    ctype: CoxeterType,
    elements: Vec<GroupElement>,
    index: HashMap<GroupElement, ElemId>,
    simple_elems: Vec<ElemId>,
    simple_reflections: Vec<ReflectionId>,
    left_simple: Vec<Vec<ElemId>>,
    right_simple: Vec<Vec<ElemId>>,
    inverse: Vec<ElemId>,
    length: Vec<usize>,
    coxeter_matrix: Vec<Vec<u32>>,
    reflections: Vec<ElemId>,
    reflection_of_elem: HashMap<ElemId, ReflectionId>,
    roots: Option<Vec<Vec<i64>>>,
    // conj[w][t] = index of w t w^{-1}
    conj: Vec<Vec<ReflectionId>>,
    class_of: Vec<usize>,
    classes: Vec<Vec<ReflectionId>>,
}

impl CoxeterSystem {
    pub fn new(ctype: CoxeterType) -> Self {
        let m = ctype.m.unwrap_or(0);
        let (simple_roots, positive_roots) = model_roots(&ctype);
        let simple_models: Vec<GroupElement> =
            simple_roots.iter().map(|r| model_reflection(&ctype, r)).collect();

        let identity = match ctype.family {
            Family::A => GroupElement::Perm((0..=ctype.rank as u8).collect()),
            Family::B | Family::D => GroupElement::Signed((1..=ctype.rank as i8).collect()),
            Family::I2 => GroupElement::Dihedral { m, rot: 0, flip: false },
        };

        // breadth-first enumeration by left multiplication
        let mut elements = vec![identity.clone()];
        let mut index = HashMap::from([(identity, 0usize)]);
        let mut left_simple: Vec<Vec<ElemId>> = vec![Vec::new(); simple_models.len()];
        let mut head = 0;
        while head < elements.len() {
            let w = elements[head].clone();
            for (s, sm) in simple_models.iter().enumerate() {
                let sw = sm.compose(&w).expect("same model");
                let id = match index.get(&sw) {
                    Some(&id) => id,
                    None => {
                        elements.push(sw.clone());
                        index.insert(sw, elements.len() - 1);
                        elements.len() - 1
                    }
                };
                left_simple[s].push(id);
            }
            head += 1;
        }

        let lookup = |g: &GroupElement| index[g];
        let right_simple: Vec<Vec<ElemId>> = simple_models
            .iter()
            .map(|sm| elements.iter().map(|w| lookup(&w.compose(sm).unwrap())).collect())
            .collect();
        let inverse: Vec<ElemId> = elements.iter().map(|w| lookup(&w.inverse())).collect();

        let length: Vec<usize> = elements
            .iter()
            .map(|w| {
                positive_roots
                    .iter()
                    .filter(|r| !act_on_root(w, r).is_positive(m))
                    .count()
            })
            .collect();

        let reflection_models: Vec<GroupElement> =
            positive_roots.iter().map(|r| model_reflection(&ctype, r)).collect();
        let reflections: Vec<ElemId> = reflection_models.iter().map(lookup).collect();
        let reflection_of_elem: HashMap<ElemId, ReflectionId> =
            reflections.iter().enumerate().map(|(t, &e)| (e, t)).collect();
        let simple_elems: Vec<ElemId> = simple_models.iter().map(lookup).collect();
        let simple_reflections: Vec<ReflectionId> =
            simple_elems.iter().map(|e| reflection_of_elem[e]).collect();

        let conj: Vec<Vec<ReflectionId>> = elements
            .iter()
            .enumerate()
            .map(|(wi, w)| {
                let winv = &elements[inverse[wi]];
                reflection_models
                    .iter()
                    .map(|t| {
                        let c = w.compose(&t.compose(winv).unwrap()).unwrap();
                        reflection_of_elem[&lookup(&c)]
                    })
                    .collect()
            })
            .collect();

        let roots = if ctype.is_crystallographic() {
            Some(match ctype.family {
                Family::I2 => {
                    let coords = dihedral_root_coordinates(m, &simple_models);
                    positive_roots
                        .iter()
                        .map(|r| match r {
                            ModelRoot::Index(i) => coords[i].clone(),
                            ModelRoot::Vector(_) => unreachable!(),
                        })
                        .collect()
                }
                _ => positive_roots
                    .iter()
                    .map(|r| match r {
                        ModelRoot::Vector(v) => v.clone(),
                        ModelRoot::Index(_) => unreachable!(),
                    })
                    .collect(),
            })
        } else {
            None
        };

        let mut sys = CoxeterSystem {
            ctype,
            elements,
            index,
            simple_elems,
            simple_reflections,
            left_simple,
            right_simple,
            inverse,
            length,
            coxeter_matrix: Vec::new(),
            reflections,
            reflection_of_elem,
            roots,
            conj,
            class_of: Vec::new(),
            classes: Vec::new(),
        };
        sys.coxeter_matrix = sys.compute_coxeter_matrix();
        sys.compute_classes();
        sys
    }

    fn compute_coxeter_matrix(&self) -> Vec<Vec<u32>> {
        let r = self.simple_elems.len();
        let mut mat = vec![vec![1u32; r]; r];
        for i in 0..r {
            for j in 0..r {
                if i != j {
                    let st = self.mul(self.simple_elems[i], self.simple_elems[j]);
                    mat[i][j] = self.element_order(st) as u32;
                }
            }
        }
        mat
    }

    fn compute_classes(&mut self) {
        let n = self.reflections.len();
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for start in 0..n {
            if class_of[start] != usize::MAX {
                continue;
            }
            let c = classes.len();
            let mut members = vec![start];
            class_of[start] = c;
            let mut head = 0;
            while head < members.len() {
                let t = members[head];
                for &s in &self.simple_elems {
                    let u = self.conj[s][t];
                    if class_of[u] == usize::MAX {
                        class_of[u] = c;
                        members.push(u);
                    }
                }
                head += 1;
            }
            members.sort_unstable();
            classes.push(members);
        }
        self.class_of = class_of;
        self.classes = classes;
    }

    pub fn ctype(&self) -> &CoxeterType {
        &self.ctype
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn rank(&self) -> usize {
        self.simple_elems.len()
    }

    pub fn identity(&self) -> ElemId {
        0
    }

    pub fn element(&self, w: ElemId) -> &GroupElement {
        &self.elements[w]
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn index_of(&self, g: &GroupElement) -> Result<ElemId, CoxeterError> {
        self.index.get(g).copied().ok_or(CoxeterError::ForeignElement)
    }

    /// Group product on model elements.
    pub fn multiply(&self, w: &GroupElement, v: &GroupElement) -> Result<GroupElement, CoxeterError> {
        let p = w.compose(v)?;
        self.index_of(&p)?;
        Ok(p)
    }

    pub fn invert(&self, w: &GroupElement) -> Result<GroupElement, CoxeterError> {
        self.index_of(w)?;
        Ok(w.inverse())
    }

    /// Group product on indices.
    pub fn mul(&self, w: ElemId, v: ElemId) -> ElemId {
        let p = self.elements[w].compose(&self.elements[v]).expect("same model");
        self.index[&p]
    }

    pub fn inv(&self, w: ElemId) -> ElemId {
        self.inverse[w]
    }

    /// `s·w` for the simple generator with position `s`.
    pub fn left_mul_simple(&self, s: usize, w: ElemId) -> ElemId {
        self.left_simple[s][w]
    }

    /// `w·s` for the simple generator with position `s`.
    pub fn right_mul_simple(&self, w: ElemId, s: usize) -> ElemId {
        self.right_simple[s][w]
    }

    pub fn simple_element(&self, s: usize) -> ElemId {
        self.simple_elems[s]
    }

    pub fn simple_reflection(&self, s: usize) -> ReflectionId {
        self.simple_reflections[s]
    }

    pub fn coxeter_matrix(&self) -> &[Vec<u32>] {
        &self.coxeter_matrix
    }

    /// Number of positive roots sent to negative roots.
    pub fn length(&self, w: ElemId) -> usize {
        self.length[w]
    }

    pub fn longest_element(&self) -> ElemId {
        (0..self.order()).max_by_key(|&w| self.length[w]).unwrap()
    }

    pub fn element_order(&self, w: ElemId) -> usize {
        let mut k = 1;
        let mut p = w;
        while p != 0 {
            p = self.mul(p, w);
            k += 1;
        }
        k
    }

    /// A reduced word `[s_1, .., s_k]` with `w = s_1 ⋯ s_k`, obtained by
    /// repeatedly stripping the first left descent.
    pub fn reduced_word(&self, w: ElemId) -> Vec<usize> {
        let mut word = Vec::with_capacity(self.length[w]);
        let mut cur = w;
        while cur != 0 {
            let s = (0..self.rank())
                .find(|&s| self.length[self.left_simple[s][cur]] < self.length[cur])
                .expect("non-identity element has a left descent");
            word.push(s);
            cur = self.left_simple[s][cur];
        }
        word
    }

    /// Every reduced word of `w`.
    pub fn all_reduced_words(&self, w: ElemId) -> Vec<Vec<usize>> {
        if w == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for s in 0..self.rank() {
            let sw = self.left_simple[s][w];
            if self.length[sw] < self.length[w] {
                for mut tail in self.all_reduced_words(sw) {
                    tail.insert(0, s);
                    out.push(tail);
                }
            }
        }
        out
    }

    pub fn word_to_element(&self, word: &[usize]) -> ElemId {
        word.iter().rev().fold(0, |acc, &s| self.left_simple[s][acc])
    }

    pub fn num_reflections(&self) -> usize {
        self.reflections.len()
    }

    pub fn reflection_element(&self, t: ReflectionId) -> ElemId {
        self.reflections[t]
    }

    pub fn reflection_of(&self, w: ElemId) -> Option<ReflectionId> {
        self.reflection_of_elem.get(&w).copied()
    }

    /// Index of `w t w^{-1}`.
    pub fn conjugate_reflection(&self, w: ElemId, t: ReflectionId) -> ReflectionId {
        self.conj[w][t]
    }

    /// Checked variant of [`Self::conjugate_reflection`].
    pub fn try_conjugate_reflection(&self, w: ElemId, t: ReflectionId) -> Result<ReflectionId, CoxeterError> {
        if t >= self.num_reflections() {
            return Err(CoxeterError::BadReflection(t));
        }
        if w >= self.order() {
            return Err(CoxeterError::ForeignElement);
        }
        Ok(self.conj[w][t])
    }

    pub fn conjugation_table(&self, w: ElemId) -> &[ReflectionId] {
        &self.conj[w]
    }

    pub fn classes(&self) -> &[Vec<ReflectionId>] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, t: ReflectionId) -> usize {
        self.class_of[t]
    }

    /// Positive roots indexed like the reflections, for crystallographic types.
    pub fn roots(&self) -> Option<&[Vec<i64>]> {
        self.roots.as_deref()
    }

    pub fn is_crystallographic(&self) -> bool {
        self.roots.is_some()
    }

    /// Left inversion test: `ℓ(t·w) < ℓ(w)`.
    pub fn is_left_inversion(&self, t: ReflectionId, w: ElemId) -> bool {
        self.length[self.mul(self.reflections[t], w)] < self.length[w]
    }
}

/// Cartan–Killing name of a connected Coxeter diagram on `n` nodes with
/// edge labels `m_{ij}` (labels 2 mean no edge).
fn classify_component(nodes: &[usize], mat: &[Vec<u32>]) -> (char, usize, String) {
    let n = nodes.len();
    if n == 1 {
        return ('A', 1, "A1".into());
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let l = mat[nodes[a]][nodes[b]];
            if l > 2 {
                edges.push((a, b, l));
            }
        }
    }
    if n == 2 {
        let l = edges[0].2;
        return match l {
            3 => ('A', 2, "A2".into()),
            4 => ('B', 2, "B2".into()),
            6 => ('G', 2, "G2".into()),
            _ => ('I', 2, format!("I2({l})")),
        };
    }
    let degree = |v: usize| edges.iter().filter(|e| e.0 == v || e.1 == v).count();
    let max_label = edges.iter().map(|e| e.2).max().unwrap();
    let branch = (0..n).find(|&v| degree(v) == 3);
    match (branch, max_label) {
        (None, 3) => ('A', n, format!("A{n}")),
        (None, 4) => {
            let e = edges.iter().find(|e| e.2 == 4).unwrap();
            if degree(e.0) == 1 || degree(e.1) == 1 {
                ('B', n, format!("B{n}"))
            } else {
                ('F', n, "F4".into())
            }
        }
        (None, 5) => ('H', n, format!("H{n}")),
        (Some(c), 3) => {
            // arm lengths from the branch node
            let mut arms = Vec::new();
            for &(a, b, _) in edges.iter().filter(|e| e.0 == c || e.1 == c) {
                let mut prev = c;
                let mut cur = if a == c { b } else { a };
                let mut len = 1;
                loop {
                    let next = edges.iter().find_map(|&(x, y, _)| {
                        if x == cur && y != prev {
                            Some(y)
                        } else if y == cur && x != prev {
                            Some(x)
                        } else {
                            None
                        }
                    });
                    match next {
                        Some(nx) => {
                            prev = cur;
                            cur = nx;
                            len += 1;
                        }
                        None => break,
                    }
                }
                arms.push(len);
            }
            arms.sort_unstable();
            if arms[0] == 1 && arms[1] == 1 {
                ('D', n, format!("D{n}"))
            } else {
                ('E', n, format!("E{n}"))
            }
        }
        _ => ('?', n, format!("?{n}")),
    }
}

impl CoxeterSystem {
    /// Canonical Coxeter generators of the reflection subgroup whose
    /// reflection set is `refls`: the reflections `t` of the subgroup whose
    /// only left inversion inside the subgroup is `t` itself.
    pub fn canonical_generators(&self, refls: &[ReflectionId]) -> Vec<ReflectionId> {
        refls
            .iter()
            .copied()
            .filter(|&t| {
                let te = self.reflections[t];
                refls.iter().all(|&u| u == t || !self.is_left_inversion(u, te))
            })
            .collect()
    }

    /// Type of the reflection subgroup with reflection set `refls`, written
    /// like `A1^2A3`; the trivial subgroup is `1`.
    pub fn subgroup_type(&self, refls: &[ReflectionId]) -> String {
        let gens = self.canonical_generators(refls);
        if gens.is_empty() {
            return "1".into();
        }
        let n = gens.len();
        let mut mat = vec![vec![1u32; n]; n];
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    let p = self.mul(self.reflections[gens[a]], self.reflections[gens[b]]);
                    mat[a][b] = self.element_order(p) as u32;
                }
            }
        }
        let mut seen = vec![false; n];
        let mut parts = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                for u in 0..n {
                    if !seen[u] && mat[v][u] > 2 {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
                head += 1;
            }
            parts.push(classify_component(&comp, &mat));
        }
        parts.sort();
        let mut out = String::new();
        let mut i = 0;
        while i < parts.len() {
            let mut j = i;
            while j < parts.len() && parts[j] == parts[i] {
                j += 1;
            }
            out.push_str(&parts[i].2);
            if j - i > 1 {
                out.push_str(&format!("^{}", j - i));
            }
            i = j;
        }
        out
    }
}
