//! The Möbius algebra of a subgroup lattice and its group-level matrix model.
//!
//! On the basis `e_λ` the product is `e_λ e_μ = e_{λ∨μ}`. The zeta transform
//! `e_λ ↦ Σ_{μ ≥ λ} ε_μ` identifies it with the algebra of functions on the
//! lattice, whose basis `ε_λ` consists of orthogonal idempotents.
//!
//! At the group level, `kW ⋉ k^L` decomposes over W-orbits `X` into matrix
//! algebras `Mat_X(k G_{x_*})` via [`Theta`].

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::coxeter::{CoxeterSystem, ElemId};
use crate::lattice::SubgroupLattice;
use crate::linalg;

/// Ring operations needed for coefficients.
pub trait Coefficient:
    Clone + PartialEq + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}

impl<T> Coefficient for T where
    T: Clone + PartialEq + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>
{
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoebiusError {
    #[error("section is invalid at lattice element {0}")]
    InvalidSection(usize),
}

/// `mu[x][y]` for `x ≤ y`, zero otherwise.
pub fn moebius_function(l: &SubgroupLattice) -> Vec<Vec<i64>> {
    let n = l.len();
    let mut mu = vec![vec![0i64; n]; n];
    // indices are sorted by size, so z < y in the order forces index z < y
    for x in 0..n {
        mu[x][x] = 1;
        for y in x + 1..n {
            if !l.leq(x, y) {
                continue;
            }
            let s: i64 = (x..y).filter(|&z| l.leq(x, z) && l.leq(z, y)).map(|z| mu[x][z]).sum();
            mu[x][y] = -s;
        }
    }
    mu
}

/// Element of the Möbius algebra, on the `e_λ` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MoebiusElem<T> {
    coeffs: Vec<T>,
}

/// Element of the function algebra, on the `ε_λ` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionElem<T> {
    coeffs: Vec<T>,
}

macro_rules! vector_ops {
    ($ty:ident) => {
        impl<T: Coefficient> $ty<T> {
            pub fn zero(n: usize) -> Self {
                $ty { coeffs: vec![T::zero(); n] }
            }

            pub fn basis(n: usize, i: usize) -> Self {
                let mut v = Self::zero(n);
                v.coeffs[i] = T::one();
                v
            }

            pub fn from_coeffs(coeffs: Vec<T>) -> Self {
                $ty { coeffs }
            }

            pub fn coeffs(&self) -> &[T] {
                &self.coeffs
            }

            pub fn coeff(&self, i: usize) -> &T {
                &self.coeffs[i]
            }

            pub fn is_zero(&self) -> bool {
                self.coeffs.iter().all(|c| c.is_zero())
            }

            pub fn add(&self, other: &Self) -> Self {
                let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
                $ty { coeffs }
            }

            pub fn sub(&self, other: &Self) -> Self {
                let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() - b.clone()).collect();
                $ty { coeffs }
            }

            pub fn scale(&self, c: &T) -> Self {
                $ty { coeffs: self.coeffs.iter().map(|a| c.clone() * a.clone()).collect() }
            }
        }
    };
}

vector_ops!(MoebiusElem);
vector_ops!(FunctionElem);

impl<T: Coefficient> MoebiusElem<T> {
    pub fn mul(&self, other: &Self, l: &SubgroupLattice) -> Self {
        let n = l.len();
        let mut out = Self::zero(n);
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let k = l.join(a, b);
                out.coeffs[k] = out.coeffs[k].clone() + ca.clone() * cb.clone();
            }
        }
        out
    }

    /// The identity `e_⊥`, indexed by the trivial subgroup.
    pub fn identity(l: &SubgroupLattice) -> Self {
        Self::basis(l.len(), l.trivial())
    }
}

impl<T: Coefficient> FunctionElem<T> {
    pub fn mul(&self, other: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() * b.clone()).collect();
        FunctionElem { coeffs }
    }
}

fn from_i64<T: Coefficient>(v: i64) -> T {
    let mut acc = T::zero();
    for _ in 0..v.unsigned_abs() {
        acc = acc + T::one();
    }
    if v < 0 {
        -acc
    } else {
        acc
    }
}

/// `e_λ ↦ Σ_{μ ≥ λ} ε_μ`, extended linearly.
pub fn zeta_transform<T: Coefficient>(a: &MoebiusElem<T>, l: &SubgroupLattice) -> FunctionElem<T> {
    let n = l.len();
    let mut out = FunctionElem::<T>::zero(n);
    for (lam, c) in a.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for mu in 0..n {
            if l.leq(lam, mu) {
                out.coeffs[mu] = out.coeffs[mu].clone() + c.clone();
            }
        }
    }
    out
}

/// Inverse of [`zeta_transform`], using the lattice Möbius function.
pub fn moebius_transform<T: Coefficient>(f: &FunctionElem<T>, l: &SubgroupLattice, mu: &[Vec<i64>]) -> MoebiusElem<T> {
    let n = l.len();
    let mut out = MoebiusElem::<T>::zero(n);
    for (x, c) in f.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for y in x..n {
            if mu[x][y] != 0 {
                out.coeffs[y] = out.coeffs[y].clone() + from_i64::<T>(mu[x][y]) * c.clone();
            }
        }
    }
    out
}

/// Expansion of `ε_λ` on the `e` basis: `Σ_{μ ≥ λ} μ(λ, μ) e_μ`.
pub fn primitive_idempotent<T: Coefficient>(l: &SubgroupLattice, mu: &[Vec<i64>], lam: usize) -> MoebiusElem<T> {
    moebius_transform(&FunctionElem::basis(l.len(), lam), l, mu)
}

/// Integer expansions of every `ε_λ`, as sparse `(μ, coefficient)` lists.
pub fn idempotent_expansions(l: &SubgroupLattice, mu: &[Vec<i64>]) -> Vec<Vec<(usize, i64)>> {
    (0..l.len())
        .map(|x| (x..l.len()).filter(|&y| mu[x][y] != 0).map(|y| (y, mu[x][y])).collect())
        .collect()
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Element of the rational group algebra of a stabilizer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupAlgebraElem {
    terms: BTreeMap<ElemId, BigRational>,
}

impl GroupAlgebraElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn group_element(g: ElemId) -> Self {
        Self::term(g, q(1))
    }

    pub fn term(g: ElemId, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(g, c);
        }
        GroupAlgebraElem { terms }
    }

    pub fn terms(&self) -> &BTreeMap<ElemId, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, g: ElemId) -> BigRational {
        self.terms.get(&g).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, g: ElemId, c: &BigRational) {
        let e = self.terms.entry(g).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&g);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (&g, c) in &other.terms {
            self.add_term(g, c);
        }
    }

    pub fn mul(&self, other: &Self, w: &CoxeterSystem) -> Self {
        let mut out = Self::zero();
        for (&g, a) in &self.terms {
            for (&h, b) in &other.terms {
                out.add_term(w.mul(g, h), &(a * b));
            }
        }
        out
    }
}

/// One matrix block `Mat_X(k G_{x_*})` per W-orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockMatrixElem {
    blocks: Vec<Vec<Vec<GroupAlgebraElem>>>,
}

impl BlockMatrixElem {
    pub fn zero(sizes: &[usize]) -> Self {
        let blocks = sizes.iter().map(|&n| vec![vec![GroupAlgebraElem::zero(); n]; n]).collect();
        BlockMatrixElem { blocks }
    }

    pub fn identity(sizes: &[usize], w: &CoxeterSystem) -> Self {
        let mut m = Self::zero(sizes);
        for b in m.blocks.iter_mut() {
            for (i, row) in b.iter_mut().enumerate() {
                row[i] = GroupAlgebraElem::group_element(w.identity());
            }
        }
        m
    }

    pub fn blocks(&self) -> &[Vec<Vec<GroupAlgebraElem>>] {
        &self.blocks
    }

    pub fn entry(&self, block: usize, row: usize, col: usize) -> &GroupAlgebraElem {
        &self.blocks[block][row][col]
    }

    pub fn entry_mut(&mut self, block: usize, row: usize, col: usize) -> &mut GroupAlgebraElem {
        &mut self.blocks[block][row][col]
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            for (ra, rb) in a.iter_mut().zip(b) {
                for (x, y) in ra.iter_mut().zip(rb) {
                    x.add_assign(y);
                }
            }
        }
    }

    pub fn mul(&self, other: &Self, w: &CoxeterSystem) -> Self {
        let sizes: Vec<usize> = self.blocks.iter().map(Vec::len).collect();
        let mut out = Self::zero(&sizes);
        for (k, (a, b)) in self.blocks.iter().zip(&other.blocks).enumerate() {
            let n = a.len();
            for i in 0..n {
                for j in 0..n {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    for l in 0..n {
                        if !b[j][l].is_zero() {
                            let p = a[i][j].mul(&b[j][l], w);
                            out.blocks[k][i][l].add_assign(&p);
                        }
                    }
                }
            }
        }
        out
    }

    /// `Σ_X Σ_i t(m_X[i][i])` with `t` the coefficient of the identity.
    pub fn block_trace(&self, w: &CoxeterSystem) -> BigRational {
        let mut t = BigRational::zero();
        for b in &self.blocks {
            for (i, row) in b.iter().enumerate() {
                t += row[i].coeff(w.identity());
            }
        }
        t
    }
}

/// The isomorphism `kW ⋉ k^L → ⊕_X Mat_X(k G_{x_*})` for a fixed section.
#[derive(Debug, Clone)]
pub struct Theta {
    /// Lattice index ↦ (orbit, position in the orbit).
    position: Vec<(usize, usize)>,
    sizes: Vec<usize>,
    stabilizers: Vec<Vec<ElemId>>,
    section: Vec<ElemId>,
    /// `act[g][x] = g·x`.
    act: Vec<Vec<usize>>,
}

impl Theta {
    /// Uses the lattice's own BFS section.
    pub fn new(w: &CoxeterSystem, l: &SubgroupLattice) -> Self {
        let section = (0..l.len()).map(|i| l.section(i)).collect();
        Self::with_section(w, l, section).expect("lattice sections are valid")
    }

    /// Any section with `τ(x)·x_* = x` works.
    pub fn with_section(w: &CoxeterSystem, l: &SubgroupLattice, section: Vec<ElemId>) -> Result<Self, MoebiusError> {
        let act: Vec<Vec<usize>> = (0..w.order()).map(|g| (0..l.len()).map(|x| l.act(w, g, x)).collect()).collect();
        let mut position = vec![(0, 0); l.len()];
        let mut sizes = Vec::new();
        let mut stabilizers = Vec::new();
        for (k, o) in l.orbits().iter().enumerate() {
            for (p, &x) in o.members.iter().enumerate() {
                position[x] = (k, p);
                if act[section[x]][o.representative] != x {
                    return Err(MoebiusError::InvalidSection(x));
                }
            }
            sizes.push(o.members.len());
            stabilizers.push((0..w.order()).filter(|&g| act[g][o.representative] == o.representative).collect());
        }
        Ok(Theta { position, sizes, stabilizers, section, act })
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn stabilizer(&self, orbit: usize) -> &[ElemId] {
        &self.stabilizers[orbit]
    }

    pub fn act(&self, g: ElemId, x: usize) -> usize {
        self.act[g][x]
    }

    /// Image of the basis element `g ε_α`.
    pub fn basis_image(&self, w: &CoxeterSystem, g: ElemId, alpha: usize) -> BlockMatrixElem {
        let mut m = BlockMatrixElem::zero(&self.sizes);
        self.add_basis_image(w, g, alpha, &BigRational::one(), &mut m);
        m
    }

    fn add_basis_image(&self, w: &CoxeterSystem, g: ElemId, alpha: usize, c: &BigRational, m: &mut BlockMatrixElem) {
        let ga = self.act[g][alpha];
        let h = w.mul(w.inv(self.section[ga]), w.mul(g, self.section[alpha]));
        let (k, col) = self.position[alpha];
        let row = self.position[ga].1;
        m.blocks[k][row][col].add_term(h, c);
    }

    /// `θ(ε_α) = E_{α,α}`.
    pub fn idempotent(&self, w: &CoxeterSystem, alpha: usize) -> BlockMatrixElem {
        self.basis_image(w, w.identity(), alpha)
    }

    /// `θ(g) = Σ_x τ(gx)^{-1} g τ(x) E_{gx,x}`.
    pub fn group(&self, w: &CoxeterSystem, g: ElemId) -> BlockMatrixElem {
        let mut m = BlockMatrixElem::zero(&self.sizes);
        for x in 0..self.position.len() {
            self.add_basis_image(w, g, x, &BigRational::one(), &mut m);
        }
        m
    }

    /// Image of `Σ c · g ε_α`.
    pub fn combination<'a>(
        &self,
        w: &CoxeterSystem,
        terms: impl IntoIterator<Item = (ElemId, usize, &'a BigRational)>,
    ) -> BlockMatrixElem {
        let mut m = BlockMatrixElem::zero(&self.sizes);
        for (g, alpha, c) in terms {
            self.add_basis_image(w, g, alpha, c, &mut m);
        }
        m
    }

    /// Matrix of θ from the basis `g ε_α` to the coordinates
    /// (orbit, row, column, stabilizer element). Square by orbit-stabilizer.
    pub fn coordinate_matrix(&self, w: &CoxeterSystem) -> Vec<Vec<BigRational>> {
        let mut coord: BTreeMap<(usize, usize, usize, ElemId), usize> = BTreeMap::new();
        for (k, &n) in self.sizes.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    for &h in &self.stabilizers[k] {
                        let next = coord.len();
                        coord.insert((k, i, j, h), next);
                    }
                }
            }
        }
        let nl = self.position.len();
        let cols = w.order() * nl;
        let mut m = vec![vec![BigRational::zero(); cols]; coord.len()];
        for g in 0..w.order() {
            for alpha in 0..nl {
                let img = self.basis_image(w, g, alpha);
                for (k, b) in img.blocks.iter().enumerate() {
                    for (i, row) in b.iter().enumerate() {
                        for (j, e) in row.iter().enumerate() {
                            for (&h, c) in e.terms() {
                                m[coord[&(k, i, j, h)]][g * nl + alpha] = c.clone();
                            }
                        }
                    }
                }
            }
        }
        m
    }

    /// Determinant of [`Self::coordinate_matrix`], or `None` if not square.
    pub fn bijectivity_determinant(&self, w: &CoxeterSystem) -> Option<BigRational> {
        let m = self.coordinate_matrix(w);
        if m.len() != m.first().map_or(0, Vec::len) {
            return None;
        }
        Some(linalg::det(&m))
    }
}

/// Product in `kW ⋉ k^L` on the basis `g ε_α`:
/// `(g ε_α)(h ε_β) = δ_{α, h·β} gh ε_β`.
pub fn semidirect_product(w: &CoxeterSystem, theta: &Theta, a: (ElemId, usize), b: (ElemId, usize)) -> Option<(ElemId, usize)> {
    let (g, alpha) = a;
    let (h, beta) = b;
    (theta.act(h, beta) == alpha).then(|| (w.mul(g, h), beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::CoxeterType;
    use crate::lattice::{enumerate_l_infinity, SubgroupLattice};

    fn rat(n: i64) -> BigRational {
        q(n)
    }

    /// μ from the defining recursion summed on the right instead of the left.
    fn moebius_right(l: &SubgroupLattice) -> Vec<Vec<i64>> {
        let n = l.len();
        let mut mu = vec![vec![0i64; n]; n];
        for y in 0..n {
            mu[y][y] = 1;
            for x in (0..y).rev() {
                if l.leq(x, y) {
                    mu[x][y] = -(x + 1..=y).filter(|&z| l.leq(x, z) && l.leq(z, y)).map(|z| mu[z][y]).sum::<i64>();
                }
            }
        }
        mu
    }

    #[test]
    fn moebius_of_partition_lattice() {
        let w = CoxeterSystem::new(CoxeterType::a(2));
        let l = enumerate_l_infinity(&w).unwrap();
        let mu = moebius_function(&l);
        assert_eq!(mu[l.trivial()][l.top()], 2);
        // partition lattice of a 4-set: μ(0̂, 1̂) = -3!
        let w = CoxeterSystem::new(CoxeterType::a(3));
        let l = enumerate_l_infinity(&w).unwrap();
        let mu = moebius_function(&l);
        assert_eq!(mu[l.trivial()][l.top()], -6);
        assert_eq!(mu, moebius_right(&l));
    }

    #[test]
    fn two_chain_transforms() {
        let w = CoxeterSystem::new(CoxeterType::a(1));
        let l = enumerate_l_infinity(&w).unwrap();
        assert_eq!(l.len(), 2);
        let mu = moebius_function(&l);
        let e0 = MoebiusElem::<BigRational>::basis(2, 0);
        let e1 = MoebiusElem::<BigRational>::basis(2, 1);
        assert_eq!(zeta_transform(&e0, &l).coeffs(), &[rat(1), rat(1)]);
        assert_eq!(zeta_transform(&e1, &l).coeffs(), &[rat(0), rat(1)]);
        let eps_triv: MoebiusElem<BigRational> = primitive_idempotent(&l, &mu, 0);
        assert_eq!(eps_triv.coeffs(), &[rat(1), rat(-1)]);
        let eps_top: MoebiusElem<BigRational> = primitive_idempotent(&l, &mu, 1);
        assert_eq!(eps_top, e1);
    }

    #[test]
    fn zeta_is_an_algebra_isomorphism() {
        for ct in [CoxeterType::a(2), CoxeterType::b(2), CoxeterType::a(3)] {
            let w = CoxeterSystem::new(ct);
            let l = enumerate_l_infinity(&w).unwrap();
            let n = l.len();
            let mu = moebius_function(&l);
            for a in 0..n {
                let ea = MoebiusElem::<BigRational>::basis(n, a);
                assert_eq!(moebius_transform(&zeta_transform(&ea, &l), &l, &mu), ea);
                for b in 0..n {
                    let eb = MoebiusElem::<BigRational>::basis(n, b);
                    let lhs = zeta_transform(&ea.mul(&eb, &l), &l);
                    let rhs = zeta_transform(&ea, &l).mul(&zeta_transform(&eb, &l));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn idempotents_are_complete_and_orthogonal() {
        let w = CoxeterSystem::new(CoxeterType::a(2));
        let l = enumerate_l_infinity(&w).unwrap();
        let n = l.len();
        let mu = moebius_function(&l);
        let eps: Vec<MoebiusElem<BigRational>> = (0..n).map(|x| primitive_idempotent(&l, &mu, x)).collect();
        let mut sum = MoebiusElem::zero(n);
        for (x, ex) in eps.iter().enumerate() {
            sum = sum.add(ex);
            for (y, ey) in eps.iter().enumerate() {
                let p = ex.mul(ey, &l);
                if x == y {
                    assert_eq!(&p, ex);
                } else {
                    assert!(p.is_zero());
                }
            }
        }
        assert_eq!(sum, MoebiusElem::identity(&l));
    }

    #[test]
    fn theta_basics_a2() {
        let w = CoxeterSystem::new(CoxeterType::a(2));
        let l = enumerate_l_infinity(&w).unwrap();
        let th = Theta::new(&w, &l);
        let id = BlockMatrixElem::identity(th.block_sizes(), &w);
        assert_eq!(th.group(&w, w.identity()), id);
        for o in l.orbits() {
            let x = o.representative;
            let (k, p) = th.position[x];
            let e = th.idempotent(&w, x);
            assert_eq!(e.entry(k, p, p), &GroupAlgebraElem::group_element(w.identity()));
        }
        // the hyperplane orbit
        let k = l.orbit_of(l.cyclic(0));
        assert_eq!(th.block_sizes()[k], 3);
        assert_eq!(th.stabilizer(k).len(), 2);
        let s = w.simple_element(0);
        let m = th.group(&w, s);
        let block = &m.blocks()[k];
        for row in block {
            assert_eq!(row.iter().filter(|e| !e.is_zero()).count(), 1);
            for e in row.iter().filter(|e| !e.is_zero()) {
                assert_eq!(e.terms().len(), 1);
                let (&h, c) = e.terms().iter().next().unwrap();
                assert!(th.stabilizer(k).contains(&h));
                assert_eq!(c, &rat(1));
            }
        }
        // s fixes its own hyperplane and swaps the other two
        let fixed = (0..3).filter(|&i| !block[i][i].is_zero()).count();
        assert_eq!(fixed, 1);
    }

    #[test]
    fn theta_is_multiplicative_and_bijective() {
        for ct in [CoxeterType::a(2), CoxeterType::b(2)] {
            let w = CoxeterSystem::new(ct);
            let l = enumerate_l_infinity(&w).unwrap();
            let th = Theta::new(&w, &l);
            let imgs: Vec<BlockMatrixElem> = (0..w.order()).map(|g| th.group(&w, g)).collect();
            for g in 0..w.order() {
                for h in 0..w.order() {
                    assert_eq!(imgs[g].mul(&imgs[h], &w), imgs[w.mul(g, h)]);
                }
            }
            for a in 0..l.len() {
                for b in 0..l.len() {
                    let p = th.idempotent(&w, a).mul(&th.idempotent(&w, b), &w);
                    if a == b {
                        assert_eq!(p, th.idempotent(&w, a));
                    } else {
                        assert_eq!(p, BlockMatrixElem::zero(th.block_sizes()));
                    }
                }
            }
            let n = l.len();
            for g in 0..w.order() {
                for alpha in 0..n {
                    for h in 0..w.order() {
                        for beta in 0..n {
                            let lhs = th.basis_image(&w, g, alpha).mul(&th.basis_image(&w, h, beta), &w);
                            let rhs = match semidirect_product(&w, &th, (g, alpha), (h, beta)) {
                                Some((gh, b)) => th.basis_image(&w, gh, b),
                                None => BlockMatrixElem::zero(th.block_sizes()),
                            };
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
            let d = th.bijectivity_determinant(&w).expect("square");
            assert!(!d.is_zero(), "{ct}");
        }
    }

    #[test]
    fn bad_section_is_rejected() {
        let w = CoxeterSystem::new(CoxeterType::a(2));
        let l = enumerate_l_infinity(&w).unwrap();
        let section = vec![w.identity(); l.len()];
        assert!(matches!(Theta::with_section(&w, &l, section), Err(MoebiusError::InvalidSection(_))));
    }

    #[test]
    fn other_sections_also_work() {
        let w = CoxeterSystem::new(CoxeterType::b(2));
        let l = enumerate_l_infinity(&w).unwrap();
        // pick the last group element mapping the representative to x
        let section: Vec<ElemId> = (0..l.len())
            .map(|x| {
                let r = l.orbits()[l.orbit_of(x)].representative;
                (0..w.order()).rev().find(|&g| l.act(&w, g, r) == x).unwrap()
            })
            .collect();
        let th = Theta::with_section(&w, &l, section).unwrap();
        for g in 0..w.order() {
            for h in 0..w.order() {
                assert_eq!(th.group(&w, g).mul(&th.group(&w, h), &w), th.group(&w, w.mul(g, h)));
            }
        }
    }
}
