//! Lattices of reflection subgroups.
//!
//! A reflection subgroup is stored as its set of reflections, which is a
//! canonical form: two subgroups are equal iff their reflection sets are. A
//! [`SubgroupLattice`] is a finite W-stable family of such subgroups that has
//! a least upper bound for every pair, computed inside the family itself.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{CoxeterSystem, ElemId, ReflectionId};

/// Default cap on the number of complement orbits searched by
/// [`enumerate_intermediate_admissible`].
pub const DEFAULT_MAX_ORBITS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("operation needs a crystallographic root system, {0} has none")]
    NotCrystallographic(String),
    #[error("L_n requires n >= 2, got {0}")]
    InvalidN(usize),
    #[error("{0} reflections exceed the supported maximum of 128")]
    TooManyReflections(usize),
    #[error("{found} complement orbits exceed the cap of {cap}")]
    TooManyOrbits { found: usize, cap: usize },
    #[error("family is not an admissible lattice: {0}")]
    NotAdmissible(String),
}

/// Bit set of reflection indices (at most 128 reflections).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ReflectionSet(u128);

impl ReflectionSet {
    pub fn empty() -> Self {
        ReflectionSet(0)
    }

    pub fn singleton(t: ReflectionId) -> Self {
        ReflectionSet(1u128 << t)
    }

    pub fn full(n: usize) -> Self {
        if n == 128 {
            ReflectionSet(u128::MAX)
        } else {
            ReflectionSet((1u128 << n) - 1)
        }
    }

    pub fn from_bits(bits: u128) -> Self {
        ReflectionSet(bits)
    }

    pub fn bits(&self) -> u128 {
        self.0
    }

    pub fn contains(&self, t: ReflectionId) -> bool {
        self.0 >> t & 1 == 1
    }

    pub fn insert(&mut self, t: ReflectionId) {
        self.0 |= 1u128 << t;
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(&self, other: &ReflectionSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(&self, other: &ReflectionSet) -> Self {
        ReflectionSet(self.0 | other.0)
    }

    pub fn intersection(&self, other: &ReflectionSet) -> Self {
        ReflectionSet(self.0 & other.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = ReflectionId> + '_ {
        let bits = self.0;
        (0..128).filter(move |&t| bits >> t & 1 == 1)
    }

    pub fn to_vec(&self) -> Vec<ReflectionId> {
        self.iter().collect()
    }

    /// Image under a permutation of reflections (e.g. a conjugation table).
    pub fn permute(&self, perm: &[ReflectionId]) -> Self {
        let mut out = 0u128;
        let mut bits = self.0;
        while bits != 0 {
            let t = bits.trailing_zeros() as usize;
            out |= 1u128 << perm[t];
            bits &= bits - 1;
        }
        ReflectionSet(out)
    }

    /// Order used to pick canonical representatives: size, then the sorted
    /// index list lexicographically.
    pub fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.to_vec().cmp(&other.to_vec()))
    }
}

impl FromIterator<ReflectionId> for ReflectionSet {
    fn from_iter<I: IntoIterator<Item = ReflectionId>>(iter: I) -> Self {
        let mut s = ReflectionSet::empty();
        for t in iter {
            s.insert(t);
        }
        s
    }
}

impl fmt::Debug for ReflectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A reflection subgroup, identified by the set of reflections it contains.
#[derive(Debug, Clone)]
pub struct ReflectionSubgroup {
    reflections: ReflectionSet,
    order: usize,
}

impl PartialEq for ReflectionSubgroup {
    fn eq(&self, other: &Self) -> bool {
        self.reflections == other.reflections
    }
}

impl Eq for ReflectionSubgroup {}

impl std::hash::Hash for ReflectionSubgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.reflections.hash(state)
    }
}

impl ReflectionSubgroup {
    /// Wraps a reflection set that is already closed; computes the order.
    pub fn from_closed_set(w: &CoxeterSystem, reflections: ReflectionSet) -> Self {
        ReflectionSubgroup { reflections, order: subgroup_order(w, &reflections) }
    }

    pub fn reflections(&self) -> &ReflectionSet {
        &self.reflections
    }

    pub fn reflection_list(&self) -> Vec<ReflectionId> {
        self.reflections.to_vec()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.reflections.is_empty()
    }

    pub fn contains(&self, other: &ReflectionSubgroup) -> bool {
        other.reflections.is_subset(&self.reflections)
    }
}

fn subgroup_order(w: &CoxeterSystem, refls: &ReflectionSet) -> usize {
    let gens: Vec<ElemId> = w
        .canonical_generators(&refls.to_vec())
        .into_iter()
        .map(|t| w.reflection_element(t))
        .collect();
    let mut seen = vec![false; w.order()];
    seen[0] = true;
    let mut stack = vec![0usize];
    let mut count = 1;
    while let Some(g) = stack.pop() {
        for &s in &gens {
            let h = w.mul(g, s);
            if !seen[h] {
                seen[h] = true;
                count += 1;
                stack.push(h);
            }
        }
    }
    count
}

fn check_size(w: &CoxeterSystem) -> Result<(), LatticeError> {
    if w.num_reflections() > 128 {
        Err(LatticeError::TooManyReflections(w.num_reflections()))
    } else {
        Ok(())
    }
}

/// Reflection set of the subgroup generated by `seed`: closure of the seed
/// under mutual conjugation.
pub fn generate_reflection_set(w: &CoxeterSystem, seed: ReflectionSet) -> ReflectionSet {
    let mut set = seed;
    let mut frontier: Vec<ReflectionId> = seed.to_vec();
    while let Some(t) = frontier.pop() {
        let te = w.reflection_element(t);
        let members: Vec<ReflectionId> = set.to_vec();
        for u in members {
            // t u t and u t u
            for (a, b) in [(te, u), (w.reflection_element(u), t)] {
                let c = w.conjugate_reflection(a, b);
                if !set.contains(c) {
                    set.insert(c);
                    frontier.push(c);
                }
            }
        }
    }
    set
}

pub fn generate_subgroup(w: &CoxeterSystem, seed: &[ReflectionId]) -> Result<ReflectionSubgroup, LatticeError> {
    check_size(w)?;
    let set = generate_reflection_set(w, seed.iter().copied().collect());
    Ok(ReflectionSubgroup::from_closed_set(w, set))
}

type Rational = Ratio<i64>;

/// Reduced row-echelon basis of the span of a set of integer vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RowEchelon {
    rows: Vec<Vec<Rational>>,
}

impl RowEchelon {
    pub fn from_vectors<'a>(vectors: impl IntoIterator<Item = &'a Vec<i64>>) -> Self {
        let mut e = RowEchelon { rows: Vec::new() };
        for v in vectors {
            e.insert(v);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[i64]) -> Vec<Rational> {
        let mut r: Vec<Rational> = v.iter().map(|&c| Rational::from_integer(c)).collect();
        for row in &self.rows {
            let p = row.iter().position(|c| !c.is_zero()).unwrap();
            if !r[p].is_zero() {
                let f = r[p];
                for (x, y) in r.iter_mut().zip(row) {
                    *x -= f * y;
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.reduce(v).iter().all(|c| c.is_zero())
    }

    /// Adds a vector; returns whether the rank grew.
    pub fn insert(&mut self, v: &[i64]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let lead = r[p];
        for x in r.iter_mut() {
            *x /= lead;
        }
        for row in self.rows.iter_mut() {
            let f = row[p];
            if !f.is_zero() {
                for (x, y) in row.iter_mut().zip(&r) {
                    *x -= f * y;
                }
            }
        }
        self.rows.push(r);
        self.rows.sort_by_key(|row| row.iter().position(|c| !c.is_zero()).unwrap());
        true
    }
}

fn roots_or_err(w: &CoxeterSystem) -> Result<&[Vec<i64>], LatticeError> {
    w.roots().ok_or_else(|| LatticeError::NotCrystallographic(w.ctype().to_string()))
}

/// Row-echelon basis of the span of the roots of a reflection set; the
/// orthogonal complement of the subgroup's fixed space.
pub fn root_span(w: &CoxeterSystem, set: &ReflectionSet) -> Result<RowEchelon, LatticeError> {
    let roots = roots_or_err(w)?;
    Ok(RowEchelon::from_vectors(set.iter().map(|t| &roots[t])))
}

/// Codimension of the fixed space, i.e. the rank of the root span.
pub fn parabolic_rank(w: &CoxeterSystem, set: &ReflectionSet) -> Result<usize, LatticeError> {
    Ok(root_span(w, set)?.rank())
}

/// All reflections whose root lies in the rational span of the roots of `set`.
pub fn parabolic_closure_set(w: &CoxeterSystem, set: &ReflectionSet) -> Result<ReflectionSet, LatticeError> {
    let roots = roots_or_err(w)?;
    let span = RowEchelon::from_vectors(set.iter().map(|t| &roots[t]));
    Ok((0..w.num_reflections()).filter(|&t| span.contains(&roots[t])).collect())
}

pub fn parabolic_closure(w: &CoxeterSystem, x: &ReflectionSubgroup) -> Result<ReflectionSubgroup, LatticeError> {
    let set = parabolic_closure_set(w, &x.reflections)?;
    Ok(ReflectionSubgroup::from_closed_set(w, set))
}

/// Lookup of roots (up to sign) to reflection indices.
fn root_index(w: &CoxeterSystem) -> Result<HashMap<Vec<i64>, ReflectionId>, LatticeError> {
    let roots = roots_or_err(w)?;
    Ok(roots.iter().enumerate().map(|(t, r)| (r.clone(), t)).collect())
}

fn positive_form(v: Vec<i64>) -> Vec<i64> {
    match v.iter().find(|&&c| c != 0) {
        Some(&c) if c < 0 => v.into_iter().map(|x| -x).collect(),
        _ => v,
    }
}

/// Smallest closed root subsystem containing the roots of `set`.
pub fn closed_closure_set(w: &CoxeterSystem, set: &ReflectionSet) -> Result<ReflectionSet, LatticeError> {
    let roots = roots_or_err(w)?;
    let lookup = root_index(w)?;
    let mut cur = generate_reflection_set(w, *set);
    loop {
        let mut next = cur;
        let members = cur.to_vec();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                for sign in [1i64, -1] {
                    let s: Vec<i64> = roots[a].iter().zip(&roots[b]).map(|(x, y)| x + sign * y).collect();
                    if let Some(&t) = lookup.get(&positive_form(s)) {
                        next.insert(t);
                    }
                }
            }
        }
        if next == cur {
            return Ok(cur);
        }
        cur = generate_reflection_set(w, next);
    }
}

pub fn closed_closure(w: &CoxeterSystem, x: &ReflectionSubgroup) -> Result<ReflectionSubgroup, LatticeError> {
    let set = closed_closure_set(w, &x.reflections)?;
    Ok(ReflectionSubgroup::from_closed_set(w, set))
}

/// Which family of reflection subgroups a lattice holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LatticeKind {
    /// All reflection subgroups.
    Infinity,
    /// Parabolic subgroups.
    Parabolic,
    /// Closed root subsystems.
    Closed,
    /// Trivial, cyclic and the whole group.
    L2,
    /// Parabolic rank at most `n`, plus the whole group.
    Ln(usize),
    /// Any other admissible family.
    Custom,
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeKind::Infinity => f.write_str("infinity"),
            LatticeKind::Parabolic => f.write_str("parabolic"),
            LatticeKind::Closed => f.write_str("closed"),
            LatticeKind::L2 => f.write_str("L2"),
            LatticeKind::Ln(n) => write!(f, "L{n}"),
            LatticeKind::Custom => f.write_str("custom"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    /// Member indices in increasing order.
    pub members: Vec<usize>,
    /// The member with the canonically smallest reflection set.
    pub representative: usize,
}

/// A finite admissible lattice of reflection subgroups with its join table,
/// generator action and orbit decomposition.
#[derive(Debug, Clone)]
pub struct SubgroupLattice {
    kind: LatticeKind,
    elements: Vec<ReflectionSubgroup>,
    index: HashMap<ReflectionSet, usize>,
    join: Vec<Vec<u32>>,
    action: Vec<Vec<u32>>,
    orbits: Vec<Orbit>,
    orbit_of: Vec<usize>,
    section: Vec<ElemId>,
}

impl SubgroupLattice {
    /// Builds the lattice on an explicit family of closed reflection sets.
    /// Fails unless the family is W-stable, contains the trivial and every
    /// cyclic subgroup, and every pair has a least upper bound in it.
    pub fn from_sets(w: &CoxeterSystem, kind: LatticeKind, sets: Vec<ReflectionSet>) -> Result<Self, LatticeError> {
        Self::build(w, kind, sets, None)
    }

    fn build(
        w: &CoxeterSystem,
        kind: LatticeKind,
        mut sets: Vec<ReflectionSet>,
        closure: Option<&dyn Fn(ReflectionSet) -> ReflectionSet>,
    ) -> Result<Self, LatticeError> {
        check_size(w)?;
        sets.sort_by(|a, b| a.canonical_cmp(b));
        sets.dedup();
        let index: HashMap<ReflectionSet, usize> = sets.iter().enumerate().map(|(i, s)| (*s, i)).collect();

        if let Some(v) = required_violation(w, &index) {
            return Err(LatticeError::NotAdmissible(v));
        }

        let mut action = Vec::with_capacity(w.rank());
        for s in 0..w.rank() {
            let perm = w.conjugation_table(w.simple_element(s));
            let mut row = Vec::with_capacity(sets.len());
            for x in &sets {
                match index.get(&x.permute(perm)) {
                    Some(&j) => row.push(j as u32),
                    None => return Err(LatticeError::NotAdmissible(format!("not W-stable at {x:?}"))),
                }
            }
            action.push(row);
        }

        let (orbits, orbit_of, section) = orbit_data(w, &sets, &action);
        let join = join_table(w, &sets, &index, &orbits, &orbit_of, &section, closure)?;

        let elements = sets.iter().map(|s| ReflectionSubgroup::from_closed_set(w, *s)).collect();
        Ok(SubgroupLattice { kind, elements, index, join, action, orbits, orbit_of, section })
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ReflectionSubgroup] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &ReflectionSubgroup {
        &self.elements[i]
    }

    pub fn set(&self, i: usize) -> &ReflectionSet {
        &self.elements[i].reflections
    }

    pub fn index_of(&self, set: &ReflectionSet) -> Option<usize> {
        self.index.get(set).copied()
    }

    pub fn trivial(&self) -> usize {
        0
    }

    pub fn top(&self) -> usize {
        self.elements.len() - 1
    }

    /// Index of the cyclic subgroup generated by reflection `t`.
    pub fn cyclic(&self, t: ReflectionId) -> usize {
        self.index[&ReflectionSet::singleton(t)]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.elements[i].reflections.is_subset(&self.elements[j].reflections)
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.join[i][j] as usize
    }

    pub fn join_table(&self) -> &[Vec<u32>] {
        &self.join
    }

    /// `s·x` for simple generator `s`.
    pub fn act_simple(&self, s: usize, i: usize) -> usize {
        self.action[s][i] as usize
    }

    pub fn action_table(&self) -> &[Vec<u32>] {
        &self.action
    }

    /// `w·x = w x w^{-1}`.
    pub fn act(&self, w: &CoxeterSystem, g: ElemId, i: usize) -> usize {
        self.index[&self.elements[i].reflections.permute(w.conjugation_table(g))]
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    pub fn orbit_of(&self, i: usize) -> usize {
        self.orbit_of[i]
    }

    /// Group element `τ(x)` with `τ(x)·x_* = x`, where `x_*` represents the
    /// orbit of `x`.
    pub fn section(&self, i: usize) -> ElemId {
        self.section[i]
    }

    /// Stabilizer of element `i`.
    pub fn stabilizer(&self, w: &CoxeterSystem, i: usize) -> Vec<ElemId> {
        (0..w.order()).filter(|&g| self.act(w, g, i) == i).collect()
    }

    /// Number of elements above `i`, itself included.
    pub fn up_set_size(&self, i: usize) -> usize {
        (0..self.len()).filter(|&j| self.leq(i, j)).count()
    }
}

fn required_violation(w: &CoxeterSystem, index: &HashMap<ReflectionSet, usize>) -> Option<String> {
    if !index.contains_key(&ReflectionSet::empty()) {
        return Some("missing the trivial subgroup".into());
    }
    for t in 0..w.num_reflections() {
        if !index.contains_key(&ReflectionSet::singleton(t)) {
            return Some(format!("missing the cyclic subgroup of reflection {t}"));
        }
    }
    None
}

type OrbitData = (Vec<Orbit>, Vec<usize>, Vec<ElemId>);

fn orbit_data(w: &CoxeterSystem, sets: &[ReflectionSet], action: &[Vec<u32>]) -> OrbitData {
    let n = sets.len();
    let mut orbit_of = vec![usize::MAX; n];
    let mut section = vec![0; n];
    let mut orbits = Vec::new();
    // sets are sorted canonically, so the first unvisited index is the
    // smallest member of its orbit
    for start in 0..n {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let o = orbits.len();
        orbit_of[start] = o;
        section[start] = w.identity();
        let mut members = vec![start];
        let mut head = 0;
        while head < members.len() {
            let x = members[head];
            for (s, row) in action.iter().enumerate() {
                let y = row[x] as usize;
                if orbit_of[y] == usize::MAX {
                    orbit_of[y] = o;
                    section[y] = w.left_mul_simple(s, section[x]);
                    members.push(y);
                }
            }
            head += 1;
        }
        members.sort_unstable();
        orbits.push(Orbit { members, representative: start });
    }
    (orbits, orbit_of, section)
}

/// Least upper bound of `mask` inside the family: the intersection of all
/// members containing it, provided that intersection is itself a member.
fn family_closure(sets: &[ReflectionSet], index: &HashMap<ReflectionSet, usize>, mask: ReflectionSet) -> Option<usize> {
    let mut acc: Option<ReflectionSet> = None;
    for s in sets {
        if mask.is_subset(s) {
            acc = Some(match acc {
                None => *s,
                Some(a) => a.intersection(s),
            });
        }
    }
    acc.and_then(|a| index.get(&a).copied())
}

fn join_table(
    w: &CoxeterSystem,
    sets: &[ReflectionSet],
    index: &HashMap<ReflectionSet, usize>,
    orbits: &[Orbit],
    orbit_of: &[usize],
    section: &[ElemId],
    closure: Option<&dyn Fn(ReflectionSet) -> ReflectionSet>,
) -> Result<Vec<Vec<u32>>, LatticeError> {
    let n = sets.len();
    let lub = |mask: ReflectionSet| -> Option<usize> {
        match closure {
            Some(c) => index.get(&c(mask)).copied(),
            None => family_closure(sets, index, mask),
        }
    };
    let mut rep_rows: HashMap<usize, Vec<u32>> = HashMap::new();
    for orbit in orbits {
        let r = orbit.representative;
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            match lub(sets[r].union(&sets[j])) {
                Some(k) => row.push(k as u32),
                None => {
                    return Err(LatticeError::NotAdmissible(format!(
                        "{:?} and {:?} have no least upper bound",
                        sets[r], sets[j]
                    )))
                }
            }
        }
        rep_rows.insert(r, row);
    }
    let act = |g: ElemId, i: usize| index[&sets[i].permute(w.conjugation_table(g))];
    let mut join = vec![Vec::new(); n];
    for i in 0..n {
        let r = orbits[orbit_of[i]].representative;
        if i == r {
            join[i] = rep_rows[&r].clone();
            continue;
        }
        let g = section[i];
        let ginv = w.inv(g);
        let rrow = &rep_rows[&r];
        join[i] = (0..n).map(|j| act(g, rrow[act(ginv, j)] as usize) as u32).collect();
    }
    Ok(join)
}

/// Breadth-first closure from the cyclic subgroups: repeatedly join found
/// elements with cyclic subgroups under `closure`, keeping results accepted
/// by `keep`.
fn bfs_family(
    w: &CoxeterSystem,
    closure: &dyn Fn(ReflectionSet) -> ReflectionSet,
    keep: &dyn Fn(&ReflectionSet) -> bool,
) -> Vec<ReflectionSet> {
    let mut seen: HashSet<ReflectionSet> = HashSet::new();
    let mut found = vec![ReflectionSet::empty()];
    seen.insert(ReflectionSet::empty());
    let mut head = 0;
    while head < found.len() {
        let x = found[head];
        head += 1;
        for t in 0..w.num_reflections() {
            if x.contains(t) {
                continue;
            }
            let y = closure(x.union(&ReflectionSet::singleton(t)));
            if keep(&y) && seen.insert(y) {
                found.push(y);
            }
        }
    }
    found
}

/// All reflection subgroups.
pub fn enumerate_l_infinity(w: &CoxeterSystem) -> Result<SubgroupLattice, LatticeError> {
    check_size(w)?;
    let gen = |m: ReflectionSet| generate_reflection_set(w, m);
    let sets = bfs_family(w, &gen, &|_| true);
    SubgroupLattice::build(w, LatticeKind::Infinity, sets, Some(&gen))
}

/// Parabolic subgroups.
pub fn enumerate_l_p(w: &CoxeterSystem) -> Result<SubgroupLattice, LatticeError> {
    check_size(w)?;
    roots_or_err(w)?;
    let close = |m: ReflectionSet| parabolic_closure_set(w, &m).expect("crystallographic");
    let sets = bfs_family(w, &close, &|_| true);
    SubgroupLattice::build(w, LatticeKind::Parabolic, sets, Some(&close))
}

/// Closed root subsystems.
pub fn enumerate_l_c(w: &CoxeterSystem) -> Result<SubgroupLattice, LatticeError> {
    check_size(w)?;
    roots_or_err(w)?;
    let close = |m: ReflectionSet| closed_closure_set(w, &m).expect("crystallographic");
    let sets = bfs_family(w, &close, &|_| true);
    SubgroupLattice::build(w, LatticeKind::Closed, sets, Some(&close))
}

/// Reflection subgroups of parabolic rank at most `n`, plus the whole group.
pub fn enumerate_l_n(w: &CoxeterSystem, n: usize) -> Result<SubgroupLattice, LatticeError> {
    if n < 2 {
        return Err(LatticeError::InvalidN(n));
    }
    check_size(w)?;
    roots_or_err(w)?;
    let gen = |m: ReflectionSet| generate_reflection_set(w, m);
    let keep = |s: &ReflectionSet| parabolic_rank(w, s).expect("crystallographic") <= n;
    let mut sets = bfs_family(w, &gen, &keep);
    let top = ReflectionSet::full(w.num_reflections());
    if !sets.contains(&top) {
        sets.push(top);
    }
    SubgroupLattice::build(w, LatticeKind::Ln(n), sets, None)
}

/// Trivial subgroup, cyclic subgroups and the whole group.
pub fn enumerate_l_2(w: &CoxeterSystem) -> Result<SubgroupLattice, LatticeError> {
    check_size(w)?;
    let nr = w.num_reflections();
    let mut sets = vec![ReflectionSet::empty()];
    sets.extend((0..nr).map(ReflectionSet::singleton));
    let top = ReflectionSet::full(nr);
    if !sets.contains(&top) {
        sets.push(top);
    }
    SubgroupLattice::build(w, LatticeKind::L2, sets, None)
}

/// Why a family of subgroups fails to be admissible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdmissibilityViolation {
    MissingRequired(String),
    NotStable { element: usize, generator: usize },
    NoJoin { a: usize, b: usize },
}

/// Tests a subset (indices into `within`) for admissibility: contains the
/// trivial and cyclic subgroups, is W-stable, and has a least upper bound
/// inside the subset for every pair.
pub fn admissibility_violation(
    w: &CoxeterSystem,
    subset: &[usize],
    within: &SubgroupLattice,
) -> Option<AdmissibilityViolation> {
    let members: BTreeSet<usize> = subset.iter().copied().collect();
    if !members.contains(&within.trivial()) {
        return Some(AdmissibilityViolation::MissingRequired("trivial subgroup".into()));
    }
    for t in 0..w.num_reflections() {
        match within.index_of(&ReflectionSet::singleton(t)) {
            Some(i) if members.contains(&i) => {}
            _ => return Some(AdmissibilityViolation::MissingRequired(format!("cyclic subgroup of reflection {t}"))),
        }
    }
    for &i in &members {
        for s in 0..w.rank() {
            if !members.contains(&within.act_simple(s, i)) {
                return Some(AdmissibilityViolation::NotStable { element: i, generator: s });
            }
        }
    }
    let sets: Vec<ReflectionSet> = members.iter().map(|&i| *within.set(i)).collect();
    let local: HashMap<ReflectionSet, usize> = sets.iter().enumerate().map(|(k, s)| (*s, k)).collect();
    // W-stability lets us fix the first argument to an orbit representative
    let mut reps: BTreeSet<usize> = BTreeSet::new();
    let mut covered: HashSet<usize> = HashSet::new();
    for &i in &members {
        if covered.insert(within.orbit_of(i)) {
            reps.insert(i);
        }
    }
    for &a in &reps {
        for &b in &members {
            if family_closure(&sets, &local, within.set(a).union(within.set(b))).is_none() {
                return Some(AdmissibilityViolation::NoJoin { a, b });
            }
        }
    }
    None
}

pub fn is_admissible(w: &CoxeterSystem, subset: &[usize], within: &SubgroupLattice) -> bool {
    admissibility_violation(w, subset, within).is_none()
}

/// An orbit of `L_∞ ∖ L_p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementOrbit {
    /// Index of the orbit in the L_∞ orbit list.
    pub orbit: usize,
    pub representative: usize,
    pub size: usize,
    pub subgroup_type: String,
}

/// One admissible lattice between `L_p` and `L_∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntermediateLattice {
    /// Positions in the complement orbit list that were added to `L_p`.
    pub added: Vec<usize>,
    /// Member indices into `L_∞`, sorted.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct IntermediateSearch {
    pub complement: Vec<ComplementOrbit>,
    /// Outcome for every union of complement orbits, in bitmask order.
    pub tested: Vec<(Vec<usize>, bool)>,
    pub admissible: Vec<IntermediateLattice>,
}

impl IntermediateSearch {
    /// Admissible lattices strictly between `L_p` and `L_∞`.
    pub fn strict(&self) -> impl Iterator<Item = &IntermediateLattice> {
        let k = self.complement.len();
        self.admissible.iter().filter(move |l| !l.added.is_empty() && l.added.len() < k)
    }
}

/// Orbits of `L_∞ ∖ L_p` and every admissible union of them with `L_p`.
pub fn enumerate_intermediate_admissible(
    w: &CoxeterSystem,
    linf: &SubgroupLattice,
    max_orbits: usize,
) -> Result<IntermediateSearch, LatticeError> {
    let parabolic: Vec<bool> = (0..linf.len())
        .map(|i| parabolic_closure_set(w, linf.set(i)).map(|c| c == *linf.set(i)))
        .collect::<Result<_, _>>()?;
    let complement: Vec<ComplementOrbit> = linf
        .orbits()
        .iter()
        .enumerate()
        .filter(|(_, o)| !parabolic[o.representative])
        .map(|(k, o)| ComplementOrbit {
            orbit: k,
            representative: o.representative,
            size: o.members.len(),
            subgroup_type: w.subgroup_type(&linf.set(o.representative).to_vec()),
        })
        .collect();
    if complement.len() > max_orbits {
        return Err(LatticeError::TooManyOrbits { found: complement.len(), cap: max_orbits });
    }
    let base: Vec<usize> = (0..linf.len()).filter(|&i| parabolic[i]).collect();
    let mut tested = Vec::new();
    let mut admissible = Vec::new();
    for mask in 0u64..(1u64 << complement.len()) {
        let added: Vec<usize> = (0..complement.len()).filter(|&k| mask >> k & 1 == 1).collect();
        let mut members = base.clone();
        for &k in &added {
            members.extend(&linf.orbits()[complement[k].orbit].members);
        }
        members.sort_unstable();
        let ok = is_admissible(w, &members, linf);
        tested.push((added.clone(), ok));
        if ok {
            admissible.push(IntermediateLattice { added, members });
        }
    }
    Ok(IntermediateSearch { complement, tested, admissible })
}

/// Builds the lattice for a subset of `within` (indices).
pub fn sublattice(w: &CoxeterSystem, within: &SubgroupLattice, members: &[usize]) -> Result<SubgroupLattice, LatticeError> {
    SubgroupLattice::from_sets(w, LatticeKind::Custom, members.iter().map(|&i| *within.set(i)).collect())
}

/// Why a map between admissible lattices fails to be admissible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapViolation {
    NotIdentityOnRequired { element: usize },
    NotEquivariant { element: usize, generator: usize },
    NotJoinPreserving { a: usize, b: usize },
}

/// Checks that `image` (source index ↦ target index) is W-equivariant,
/// preserves joins and fixes the trivial and cyclic subgroups.
pub fn admissible_map_violation(
    w: &CoxeterSystem,
    source: &SubgroupLattice,
    target: &SubgroupLattice,
    image: &[usize],
) -> Option<MapViolation> {
    for (i, x) in source.elements().iter().enumerate() {
        if x.reflections().len() <= 1 && target.set(image[i]) != x.reflections() {
            return Some(MapViolation::NotIdentityOnRequired { element: i });
        }
    }
    for i in 0..source.len() {
        for s in 0..w.rank() {
            if image[source.act_simple(s, i)] != target.act_simple(s, image[i]) {
                return Some(MapViolation::NotEquivariant { element: i, generator: s });
            }
        }
    }
    for a in 0..source.len() {
        for b in a..source.len() {
            if image[source.join(a, b)] != target.join(image[a], image[b]) {
                return Some(MapViolation::NotJoinPreserving { a, b });
            }
        }
    }
    None
}

pub fn check_admissible_map(w: &CoxeterSystem, source: &SubgroupLattice, target: &SubgroupLattice, image: &[usize]) -> bool {
    admissible_map_violation(w, source, target, image).is_none()
}

/// Map induced by a closure operator landing in `target`.
pub fn closure_map(
    source: &SubgroupLattice,
    target: &SubgroupLattice,
    closure: impl Fn(&ReflectionSet) -> Result<ReflectionSet, LatticeError>,
) -> Result<Vec<usize>, LatticeError> {
    (0..source.len())
        .map(|i| {
            let c = closure(source.set(i))?;
            target
                .index_of(&c)
                .ok_or_else(|| LatticeError::NotAdmissible(format!("closure {c:?} missing from target")))
        })
        .collect()
}

pub fn parabolic_closure_map(w: &CoxeterSystem, source: &SubgroupLattice, target: &SubgroupLattice) -> Result<Vec<usize>, LatticeError> {
    closure_map(source, target, |s| parabolic_closure_set(w, s))
}

pub fn closed_closure_map(w: &CoxeterSystem, source: &SubgroupLattice, target: &SubgroupLattice) -> Result<Vec<usize>, LatticeError> {
    closure_map(source, target, |s| closed_closure_set(w, s))
}

/// Identity on members of `target`, everything else to the whole group.
pub fn truncation_map(source: &SubgroupLattice, target: &SubgroupLattice) -> Vec<usize> {
    (0..source.len())
        .map(|i| target.index_of(source.set(i)).unwrap_or(target.top()))
        .collect()
}

/// Builds the lattice selected by `kind`.
pub fn enumerate(w: &CoxeterSystem, kind: LatticeKind) -> Result<SubgroupLattice, LatticeError> {
    match kind {
        LatticeKind::Infinity => enumerate_l_infinity(w),
        LatticeKind::Parabolic => enumerate_l_p(w),
        LatticeKind::Closed => enumerate_l_c(w),
        LatticeKind::L2 => enumerate_l_2(w),
        LatticeKind::Ln(n) => enumerate_l_n(w, n),
        LatticeKind::Custom => Err(LatticeError::NotAdmissible("custom lattices need an explicit family".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::CoxeterType;

    /// Every subset of reflections that is closed under mutual conjugation.
    fn brute_force_subgroups(w: &CoxeterSystem) -> HashSet<ReflectionSet> {
        let n = w.num_reflections();
        let mut out = HashSet::new();
        for bits in 0u128..(1u128 << n) {
            let s = ReflectionSet::from_bits(bits);
            let closed = s.iter().all(|a| s.iter().all(|b| s.contains(w.conjugate_reflection(w.reflection_element(a), b))));
            if closed {
                out.insert(s);
            }
        }
        out
    }

    fn bell(n: usize) -> usize {
        // Bell triangle
        let mut row = vec![1usize];
        for _ in 1..n {
            let mut next = vec![*row.last().unwrap()];
            for &x in &row {
                let v = *next.last().unwrap() + x;
                next.push(v);
            }
            row = next;
        }
        *row.last().unwrap()
    }

    #[test]
    fn generate_examples() {
        let w = CoxeterSystem::new(CoxeterType::a(2));
        assert!(generate_subgroup(&w, &[]).unwrap().is_trivial());
        let one = generate_subgroup(&w, &[1]).unwrap();
        assert_eq!(one.reflection_list(), vec![1]);
        assert_eq!(one.order(), 2);
        let s = w.simple_reflection(0);
        let t = w.simple_reflection(1);
        let all = generate_subgroup(&w, &[s, t]).unwrap();
        assert_eq!(all.reflection_list(), vec![0, 1, 2]);
        assert_eq!(all.order(), 6);
    }

    #[test]
    fn l_infinity_matches_exhaustive_search() {
        for ct in [CoxeterType::a(1), CoxeterType::a(2), CoxeterType::b(2), CoxeterType::a(3), CoxeterType::b(3), CoxeterType::i2(6)] {
            let w = CoxeterSystem::new(ct);
            let l = enumerate_l_infinity(&w).unwrap();
            let brute = brute_force_subgroups(&w);
            let ours: HashSet<ReflectionSet> = l.elements().iter().map(|x| *x.reflections()).collect();
            assert_eq!(ours, brute, "{ct}");
        }
        assert_eq!(enumerate_l_infinity(&CoxeterSystem::new(CoxeterType::a(1))).unwrap().len(), 2);
        assert_eq!(enumerate_l_infinity(&CoxeterSystem::new(CoxeterType::a(2))).unwrap().len(), 5);
    }

    #[test]
    fn type_a_is_the_partition_lattice() {
        for n in 2..=5 {
            let w = CoxeterSystem::new(CoxeterType::a(n - 1));
            assert_eq!(enumerate_l_infinity(&w).unwrap().len(), bell(n));
            assert_eq!(enumerate_l_p(&w).unwrap().len(), bell(n));
        }
    }

    #[test]
    fn joins_are_least_upper_bounds() {
        for ct in [CoxeterType::a(3), CoxeterType::b(3), CoxeterType::d(4)] {
            let w = CoxeterSystem::new(ct);
            for l in [enumerate_l_infinity(&w).unwrap(), enumerate_l_p(&w).unwrap(), enumerate_l_2(&w).unwrap()] {
                for i in 0..l.len() {
                    for j in 0..l.len() {
                        let k = l.join(i, j);
                        assert!(l.leq(i, k) && l.leq(j, k));
                        for z in 0..l.len() {
                            if l.leq(i, z) && l.leq(j, z) {
                                assert!(l.leq(k, z), "{ct} {} join not least", l.kind());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn joins_are_equivariant() {
        let w = CoxeterSystem::new(CoxeterType::b(3));
        let l = enumerate_l_infinity(&w).unwrap();
        for g in 0..w.order() {
            for i in 0..l.len() {
                for j in 0..l.len() {
                    assert_eq!(l.act(&w, g, l.join(i, j)), l.join(l.act(&w, g, i), l.act(&w, g, j)));
                }
            }
        }
    }

    #[test]
    fn orbits_partition_and_divide_order() {
        let w = CoxeterSystem::new(CoxeterType::d(4));
        let l = enumerate_l_infinity(&w).unwrap();
        let total: usize = l.orbits().iter().map(|o| o.members.len()).sum();
        assert_eq!(total, l.len());
        for o in l.orbits() {
            assert_eq!(w.order() % o.members.len(), 0);
            let rep = *l.set(o.representative);
            assert!(o.members.iter().all(|&i| rep.canonical_cmp(l.set(i)) != std::cmp::Ordering::Greater));
            for &i in &o.members {
                assert_eq!(l.act(&w, l.section(i), o.representative), i);
            }
        }
    }

    #[test]
    fn l2_and_ln_sizes() {
        let a2 = CoxeterSystem::new(CoxeterType::a(2));
        assert_eq!(enumerate_l_2(&a2).unwrap().len(), 5);
        let b2 = CoxeterSystem::new(CoxeterType::b(2));
        assert_eq!(enumerate_l_2(&b2).unwrap().len(), 6);
        assert!(enumerate_l_infinity(&b2).unwrap().len() > 6);
        assert_eq!(enumerate_l_infinity(&b2).unwrap().len(), 8);
        assert!(matches!(enumerate_l_n(&b2, 1), Err(LatticeError::InvalidN(1))));
        let b3 = CoxeterSystem::new(CoxeterType::b(3));
        let l2 = enumerate_l_n(&b3, 2).unwrap();
        for x in l2.elements() {
            let r = parabolic_rank(&b3, x.reflections()).unwrap();
            assert!(r <= 2 || x.reflections().len() == 9);
        }
    }

    #[test]
    fn parabolic_closure_examples() {
        let d4 = CoxeterSystem::new(CoxeterType::d(4));
        let triv = generate_subgroup(&d4, &[]).unwrap();
        assert!(parabolic_closure(&d4, &triv).unwrap().is_trivial());
        let roots = d4.roots().unwrap();
        let a14: Vec<usize> = (0..12)
            .filter(|&t| (roots[t][0] != 0 && roots[t][1] != 0) || (roots[t][2] != 0 && roots[t][3] != 0))
            .collect();
        let x = generate_subgroup(&d4, &a14).unwrap();
        assert_eq!(x.reflection_list().len(), 4);
        assert_eq!(parabolic_closure(&d4, &x).unwrap().reflection_list().len(), 12);
        let lp = enumerate_l_p(&d4).unwrap();
        for p in lp.elements() {
            assert_eq!(&parabolic_closure(&d4, p).unwrap(), p);
        }
        let i5 = CoxeterSystem::new(CoxeterType::i2(5));
        assert!(matches!(parabolic_closure(&i5, &triv_of(&i5)), Err(LatticeError::NotCrystallographic(_))));
        assert!(enumerate_l_p(&i5).is_err());
    }

    fn triv_of(w: &CoxeterSystem) -> ReflectionSubgroup {
        generate_subgroup(w, &[]).unwrap()
    }

    #[test]
    fn fix_space_is_injective_on_parabolics() {
        for ct in [CoxeterType::b(3), CoxeterType::d(4), CoxeterType::a(3)] {
            let w = CoxeterSystem::new(ct);
            let linf = enumerate_l_infinity(&w).unwrap();
            let lp = enumerate_l_p(&w).unwrap();
            let spans: HashSet<RowEchelon> = linf.elements().iter().map(|x| root_span(&w, x.reflections()).unwrap()).collect();
            assert_eq!(spans.len(), lp.len(), "{ct}");
        }
    }

    #[test]
    fn closures_are_idempotent_monotone_inflationary() {
        let w = CoxeterSystem::new(CoxeterType::b(3));
        let l = enumerate_l_infinity(&w).unwrap();
        for f in [parabolic_closure_set, closed_closure_set] {
            for i in 0..l.len() {
                let x = *l.set(i);
                let cx = f(&w, &x).unwrap();
                assert!(x.is_subset(&cx));
                assert_eq!(f(&w, &cx).unwrap(), cx);
                for j in 0..l.len() {
                    if l.leq(i, j) {
                        assert!(cx.is_subset(&f(&w, l.set(j)).unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn closed_subsystems_of_b2() {
        let w = CoxeterSystem::new(CoxeterType::b(2));
        let roots = w.roots().unwrap();
        let long: ReflectionSet = (0..4).filter(|&t| roots[t].iter().all(|&c| c != 0)).collect();
        let short: ReflectionSet = (0..4).filter(|&t| roots[t].iter().filter(|&&c| c != 0).count() == 1).collect();
        assert_eq!(long.len(), 2);
        assert_eq!(closed_closure_set(&w, &long).unwrap(), long);
        assert_eq!(closed_closure_set(&w, &short).unwrap(), ReflectionSet::full(4));
        assert!(closed_closure_set(&w, &ReflectionSet::empty()).unwrap().is_empty());
        let lc = enumerate_l_c(&w).unwrap();
        assert!(lc.index_of(&short).is_none());
        assert_eq!(lc.len(), 7);
    }

    #[test]
    fn admissibility_examples() {
        let w = CoxeterSystem::new(CoxeterType::a(2));
        let linf = enumerate_l_infinity(&w).unwrap();
        let all: Vec<usize> = (0..linf.len()).collect();
        assert!(is_admissible(&w, &all, &linf));
        let without_top: Vec<usize> = all.iter().copied().filter(|&i| i != linf.top()).collect();
        assert!(matches!(admissibility_violation(&w, &without_top, &linf), Some(AdmissibilityViolation::NoJoin { .. })));

        let b2 = CoxeterSystem::new(CoxeterType::b(2));
        let linf = enumerate_l_infinity(&b2).unwrap();
        let l2: Vec<usize> = (0..linf.len()).filter(|&i| linf.set(i).len() <= 1 || i == linf.top()).collect();
        assert!(is_admissible(&b2, &l2, &linf));
        let no_cyclic: Vec<usize> = l2.iter().copied().filter(|&i| i != 1).collect();
        assert!(!is_admissible(&b2, &no_cyclic, &linf));

        let a3 = CoxeterSystem::new(CoxeterType::a(3));
        let linf = enumerate_l_infinity(&a3).unwrap();
        let mut subset: Vec<usize> = (0..linf.len()).filter(|&i| linf.set(i).len() <= 1 || i == linf.top()).collect();
        subset.push((0..linf.len()).find(|&i| linf.set(i).len() == 3).unwrap());
        assert!(matches!(admissibility_violation(&a3, &subset, &linf), Some(AdmissibilityViolation::NotStable { .. })));
    }

    #[test]
    fn type_a_has_no_intermediate_lattice() {
        let w = CoxeterSystem::new(CoxeterType::a(2));
        let linf = enumerate_l_infinity(&w).unwrap();
        let search = enumerate_intermediate_admissible(&w, &linf, DEFAULT_MAX_ORBITS).unwrap();
        assert!(search.complement.is_empty());
        assert_eq!(search.admissible.len(), 1);
    }

    #[test]
    fn admissible_map_examples() {
        let w = CoxeterSystem::new(CoxeterType::d(4));
        let linf = enumerate_l_infinity(&w).unwrap();
        let id: Vec<usize> = (0..linf.len()).collect();
        assert!(check_admissible_map(&w, &linf, &linf, &id));
        let lp = enumerate_l_p(&w).unwrap();
        let f = parabolic_closure_map(&w, &linf, &lp).unwrap();
        assert!(check_admissible_map(&w, &linf, &lp, &f));
        let l2 = enumerate_l_2(&w).unwrap();
        let t = truncation_map(&linf, &l2);
        assert!(check_admissible_map(&w, &linf, &l2, &t));
        // sending everything to the top is not the identity on cyclics
        let bad = vec![l2.top(); linf.len()];
        assert!(matches!(
            admissible_map_violation(&w, &linf, &l2, &bad),
            Some(MapViolation::NotIdentityOnRequired { .. })
        ));
    }

    #[test]
    fn d4_complement_is_one_orbit_of_a1_4() {
        let w = CoxeterSystem::new(CoxeterType::d(4));
        let linf = enumerate_l_infinity(&w).unwrap();
        let search = enumerate_intermediate_admissible(&w, &linf, DEFAULT_MAX_ORBITS).unwrap();
        assert_eq!(search.complement.len(), 1);
        assert_eq!(search.complement[0].subgroup_type, "A1^4");
        assert_eq!(search.complement[0].size, 3);
        assert_eq!(search.strict().count(), 0);
        assert_eq!(search.admissible.len(), 2);
    }

    #[test]
    fn d5_has_a_strict_intermediate_lattice() {
        let w = CoxeterSystem::new(CoxeterType::d(5));
        let linf = enumerate_l_infinity(&w).unwrap();
        let search = enumerate_intermediate_admissible(&w, &linf, DEFAULT_MAX_ORBITS).unwrap();
        let mut types: Vec<&str> = search.complement.iter().map(|c| c.subgroup_type.as_str()).collect();
        types.sort_unstable();
        assert_eq!(types, vec!["A1^2A3", "A1^4"]);
        let strict: Vec<_> = search.strict().collect();
        assert_eq!(strict.len(), 1);
        assert_eq!(search.complement[strict[0].added[0]].subgroup_type, "A1^4");
        let l = sublattice(&w, &linf, &strict[0].members).unwrap();
        assert_eq!(l.len(), strict[0].members.len());
        assert!(matches!(
            enumerate_intermediate_admissible(&w, &linf, 1),
            Err(LatticeError::TooManyOrbits { found: 2, cap: 1 })
        ));
    }
}
