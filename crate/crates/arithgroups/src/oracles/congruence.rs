//! Congruence-defined subgroups of `SL_n(Z)`: the preimage of a finite
//! subgroup of `SL_n(Z/m)`, with membership by reduction mod `m`.

use crate::matrix::MatrixError;
use crate::{Integer, Matrix, Rational, RationalMatrix};
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive};
use std::collections::{BTreeSet, HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CongruenceError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("modulus must be at least 2")]
    BadModulus,
    #[error("generator is not unimodular mod {0}")]
    NotUnimodular(u64),
    #[error("closure budget of {budget} elements exceeded")]
    BudgetExceeded { budget: usize },
    #[error("element is not an integer matrix")]
    NotIntegral,
    #[error("element does not have determinant 1")]
    NotDeterminantOne,
    #[error("ambient mismatch: expected {expected}x{expected} matrices")]
    AmbientMismatch { expected: usize },
    #[error("moduli {0} and {1} do not match and are not coprime; lcm path exceeded budget")]
    HardIntersection(u64, u64),
}

/// Dense matrix over `Z/m`, entries canonical in `0..m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModMatrix {
    pub n: usize,
    pub m: u64,
    entries: Vec<u64>,
}

impl ModMatrix {
    pub fn identity(n: usize, m: u64) -> Self {
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            entries[i * n + i] = 1 % m;
        }
        ModMatrix { n, m, entries }
    }

    pub fn from_entries(n: usize, m: u64, raw: &[i64]) -> Self {
        assert_eq!(raw.len(), n * n);
        let entries = raw
            .iter()
            .map(|&v| (v.rem_euclid(m as i64)) as u64)
            .collect();
        ModMatrix { n, m, entries }
    }

    /// Reduce an integer matrix.
    pub fn from_integer_matrix(mat: &RationalMatrix, m: u64) -> Result<Self, CongruenceError> {
        if !crate::textio::is_integral(mat) {
            return Err(CongruenceError::NotIntegral);
        }
        let n = mat.rows();
        let mm = Integer::from(m);
        let entries = mat
            .entries()
            .iter()
            .map(|e| {
                let r = e.numer().mod_floor(&mm);
                r.to_u64().expect("residue fits u64")
            })
            .collect();
        Ok(ModMatrix { n, m, entries })
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!((self.n, self.m), (other.n, other.m));
        let n = self.n;
        let m = self.m as u128;
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k] as u128;
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = other.entries[k * n + j] as u128;
                    if b != 0 {
                        let cur = entries[i * n + j] as u128;
                        entries[i * n + j] = ((cur + a * b) % m) as u64;
                    }
                }
            }
        }
        ModMatrix {
            n,
            m: self.m,
            entries,
        }
    }

    pub fn det(&self) -> u64 {
        // integer determinant of the lifted matrix, reduced
        let lifted = Matrix::new(
            self.n,
            self.n,
            self.entries
                .iter()
                .map(|&e| Rational::from_integer((e as i64).into()))
                .collect(),
        );
        let d = lifted.det().expect("square");
        d.numer()
            .mod_floor(&Integer::from(self.m))
            .to_u64()
            .unwrap()
    }

    pub fn is_scalar(&self) -> bool {
        let diag = self.entry(0, 0);
        (0..self.n).all(|i| (0..self.n).all(|j| self.entry(i, j) == if i == j { diag } else { 0 }))
    }

    /// CRT combination of residues modulo coprime m1, m2.
    pub fn crt(a: &Self, b: &Self) -> Self {
        debug_assert_eq!(a.n, b.n);
        let (m1, m2) = (a.m as i128, b.m as i128);
        let big = (m1 * m2) as u64;
        let (g, ..) = extended_gcd(m1, m2);
        debug_assert_eq!(g, 1);
        let entries = a
            .entries
            .iter()
            .zip(b.entries.iter())
            .map(|(&x, &y)| crt_pair(x as i128, m1, y as i128, m2) as u64)
            .collect();
        ModMatrix {
            n: a.n,
            m: big,
            entries,
        }
    }

    pub fn reduce(&self, m: u64) -> Self {
        debug_assert_eq!(self.m % m, 0);
        ModMatrix {
            n: self.n,
            m,
            entries: self.entries.iter().map(|&e| e % m).collect(),
        }
    }
}

fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = extended_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

fn crt_pair(r1: i128, m1: i128, r2: i128, m2: i128) -> i128 {
    let (_, u, _) = extended_gcd(m1, m2);
    let diff = (r2 - r1).rem_euclid(m2);
    (r1 + m1 * ((u * diff).rem_euclid(m2))).rem_euclid(m1 * m2)
}

/// Default cap on closure enumeration.
pub const DEFAULT_CLOSURE_BUDGET: usize = 10_000_000;

/// Membership oracle for the preimage in `SL_n(Z)` of a subgroup
/// `Hbar <= SL_n(Z/m)`: `contains(g)` iff `g mod m` lies in `Hbar`.
/// The finite closure is computed once at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceOracle {
    pub n: usize,
    pub m: u64,
    image_generators: Vec<ModMatrix>,
    closure: BTreeSet<ModMatrix>,
}

impl CongruenceOracle {
    pub fn new(
        n: usize,
        m: u64,
        image_generators: Vec<ModMatrix>,
        budget: usize,
    ) -> Result<Self, CongruenceError> {
        if m < 2 {
            return Err(CongruenceError::BadModulus);
        }
        for g in &image_generators {
            if g.n != n || g.m != m {
                return Err(CongruenceError::AmbientMismatch { expected: n });
            }
            if g.det() != 1 % m {
                return Err(CongruenceError::NotUnimodular(m));
            }
        }
        let closure = generated_closure(n, m, &image_generators, budget)?;
        Ok(CongruenceOracle {
            n,
            m,
            image_generators,
            closure,
        })
    }

    /// The principal congruence subgroup: trivial image.
    pub fn principal(n: usize, m: u64) -> Self {
        Self::new(n, m, Vec::new(), 1).expect("trivial closure")
    }

    pub fn image_generators(&self) -> &[ModMatrix] {
        &self.image_generators
    }

    pub fn closure(&self) -> &BTreeSet<ModMatrix> {
        &self.closure
    }

    pub fn closure_order(&self) -> usize {
        self.closure.len()
    }

    /// Exact membership verdict: integrality and determinant 1, then
    /// reduction into the finite image.
    pub fn contains(&self, g: &RationalMatrix) -> Result<bool, CongruenceError> {
        if g.rows() != self.n || g.cols() != self.n {
            return Err(CongruenceError::AmbientMismatch { expected: self.n });
        }
        if !crate::textio::is_integral(g) {
            return Err(CongruenceError::NotIntegral);
        }
        if g.det()? != Rational::one() {
            return Err(CongruenceError::NotDeterminantOne);
        }
        let residue = ModMatrix::from_integer_matrix(g, self.m)?;
        Ok(self.closure.contains(&residue))
    }

    /// Residue-level membership, for callers that already reduced.
    pub fn contains_residue(&self, r: &ModMatrix) -> bool {
        self.closure.contains(r)
    }

    /// Handle for `gamma Delta gamma^-1` with `gamma` in `SL_n(Z)`:
    /// conjugate the whole image.
    pub fn conjugated(&self, gamma: &RationalMatrix) -> Result<Self, CongruenceError> {
        if !crate::textio::is_integral(gamma) {
            return Err(CongruenceError::NotIntegral);
        }
        let g = ModMatrix::from_integer_matrix(gamma, self.m)?;
        let g_inv = ModMatrix::from_integer_matrix(&gamma.inverse()?, self.m)?;
        let conj = |x: &ModMatrix| g.mul(x).mul(&g_inv);
        let image_generators = self.image_generators.iter().map(conj).collect();
        let closure = self.closure.iter().map(conj).collect();
        Ok(CongruenceOracle {
            n: self.n,
            m: self.m,
            image_generators,
            closure,
        })
    }

    /// Intersection of two congruence subgroups. Same modulus is a set
    /// intersection; coprime moduli combine by CRT; otherwise the
    /// subgroup of `SL_n(Z/lcm)` is materialized by filtered
    /// enumeration, subject to `budget`.
    pub fn intersect(&self, other: &Self, budget: usize) -> Result<Self, CongruenceError> {
        if self.n != other.n {
            return Err(CongruenceError::AmbientMismatch { expected: self.n });
        }
        let n = self.n;
        if self.m == other.m {
            let closure: BTreeSet<ModMatrix> =
                self.closure.intersection(&other.closure).cloned().collect();
            let image_generators = closure.iter().cloned().collect();
            return Ok(CongruenceOracle {
                n,
                m: self.m,
                image_generators,
                closure,
            });
        }
        if gcd_u64(self.m, other.m) == 1 {
            let m = self.m * other.m;
            let mut closure = BTreeSet::new();
            for a in &self.closure {
                for b in &other.closure {
                    closure.insert(ModMatrix::crt(a, b));
                }
            }
            let image_generators = closure.iter().cloned().collect();
            return Ok(CongruenceOracle {
                n,
                m,
                image_generators,
                closure,
            });
        }
        // general case: enumerate SL_n(Z/lcm) and filter both conditions
        let m = num_integer::lcm(self.m, other.m);
        let everything = enumerate_sl(n, m, budget)?;
        let closure: BTreeSet<ModMatrix> = everything
            .into_iter()
            .filter(|x| {
                self.closure.contains(&x.reduce(self.m))
                    && other.closure.contains(&x.reduce(other.m))
            })
            .collect();
        let image_generators = closure.iter().cloned().collect();
        Ok(CongruenceOracle {
            n,
            m,
            image_generators,
            closure,
        })
    }

    /// Index of the preimage in `SL_n(Z)`: `|SL_n(Z/m)| / |Hbar|`.
    pub fn index(&self, budget: usize) -> Result<usize, CongruenceError> {
        let total = group_order_mod(self.n, self.m, budget)?;
        Ok(total / self.closure.len())
    }

    /// Set equality of handles at the image level.
    pub fn same_subgroup(&self, other: &Self) -> bool {
        self.n == other.n && self.m == other.m && self.closure == other.closure
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

fn generated_closure(
    n: usize,
    m: u64,
    gens: &[ModMatrix],
    budget: usize,
) -> Result<BTreeSet<ModMatrix>, CongruenceError> {
    let mut seen: HashSet<ModMatrix> = HashSet::new();
    let mut queue = VecDeque::new();
    let id = ModMatrix::identity(n, m);
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(cur) = queue.pop_front() {
        for g in gens {
            let next = cur.mul(g);
            if seen.insert(next.clone()) {
                if seen.len() > budget {
                    return Err(CongruenceError::BudgetExceeded { budget });
                }
                queue.push_back(next);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// `|SL_n(Z/m)|` by closure of the elementary generator images.
pub fn group_order_mod(n: usize, m: u64, budget: usize) -> Result<usize, CongruenceError> {
    if m < 2 {
        return Err(CongruenceError::BadModulus);
    }
    Ok(enumerate_sl(n, m, budget)?.len())
}

fn enumerate_sl(n: usize, m: u64, budget: usize) -> Result<BTreeSet<ModMatrix>, CongruenceError> {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut raw = vec![0i64; n * n];
                for d in 0..n {
                    raw[d * n + d] = 1;
                }
                raw[i * n + j] = 1;
                gens.push(ModMatrix::from_entries(n, m, &raw));
            }
        }
    }
    generated_closure(n, m, &gens, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elem(n: usize, i: usize, j: usize, k: i64) -> RationalMatrix {
        RationalMatrix::elementary(n, i, j, Rational::from_integer(k.into()))
    }

    #[test]
    fn group_orders_match_classical_formula() {
        // |SL_n(Z/p)| = p^{n(n-1)/2} * prod_{k=2..n} (p^k - 1); the
        // enumeration must agree with it
        assert_eq!(group_order_mod(2, 2, 1 << 20).unwrap(), 6);
        assert_eq!(group_order_mod(2, 3, 1 << 20).unwrap(), 24);
        assert_eq!(group_order_mod(3, 2, 1 << 20).unwrap(), 168);
        assert_eq!(group_order_mod(2, 5, 1 << 20).unwrap(), 120);
        // p = 2, n = 3: 2^3 * (2^2 - 1)(2^3 - 1) = 8 * 3 * 7 = 168
    }

    #[test]
    fn principal_membership() {
        let gamma2 = CongruenceOracle::principal(3, 2);
        assert!(gamma2.contains(&elem(3, 1, 0, 2)).unwrap());
        assert!(!gamma2.contains(&elem(3, 1, 0, 1)).unwrap());
        assert!(gamma2.contains(&RationalMatrix::identity(3)).unwrap());
        assert_eq!(gamma2.closure_order(), 1);
        assert_eq!(gamma2.index(1 << 20).unwrap(), 168);
    }

    #[test]
    fn upper_triangular_mod_2_oracle() {
        // image generated by the upper unitriangular elementaries mod 2
        let gens = vec![
            ModMatrix::from_entries(3, 2, &[1, 1, 0, 0, 1, 0, 0, 0, 1]),
            ModMatrix::from_entries(3, 2, &[1, 0, 0, 0, 1, 1, 0, 0, 1]),
            ModMatrix::from_entries(3, 2, &[1, 0, 1, 0, 1, 0, 0, 0, 1]),
        ];
        let oracle = CongruenceOracle::new(3, 2, gens, 1 << 20).unwrap();
        assert_eq!(oracle.closure_order(), 8);
        assert!(oracle.contains(&elem(3, 1, 0, 2)).unwrap());
        assert!(!oracle.contains(&elem(3, 1, 0, 1)).unwrap());
        assert!(oracle.contains(&elem(3, 0, 1, 1)).unwrap());
        // index 168 / 8 = 21
        assert_eq!(oracle.index(1 << 20).unwrap(), 21);
    }

    #[test]
    fn rejects_bad_elements() {
        let oracle = CongruenceOracle::principal(2, 3);
        let half = RationalMatrix::diagonal(&[
            Rational::new(1.into(), 2.into()),
            Rational::from_integer(2.into()),
        ]);
        assert_eq!(oracle.contains(&half), Err(CongruenceError::NotIntegral));
        let det2 = RationalMatrix::diagonal(&[Rational::from_integer(2.into()), Rational::one()]);
        assert_eq!(
            oracle.contains(&det2),
            Err(CongruenceError::NotDeterminantOne)
        );
        let wrong_size = RationalMatrix::identity(3);
        assert!(matches!(
            oracle.contains(&wrong_size),
            Err(CongruenceError::AmbientMismatch { .. })
        ));
    }

    #[test]
    fn principal_is_normal() {
        let gamma2 = CongruenceOracle::principal(3, 2);
        let gamma = elem(3, 0, 1, 1).matmul(&elem(3, 2, 0, 1)).unwrap();
        let conj = gamma2.conjugated(&gamma).unwrap();
        assert!(conj.same_subgroup(&gamma2));
    }

    #[test]
    fn conjugation_respects_membership() {
        let gens = vec![ModMatrix::from_entries(3, 3, &[1, 1, 0, 0, 1, 0, 0, 0, 1])];
        let oracle = CongruenceOracle::new(3, 3, gens, 1 << 20).unwrap();
        let gamma = elem(3, 2, 0, 1);
        let conj = oracle.conjugated(&gamma).unwrap();
        for probe in [elem(3, 0, 1, 1), elem(3, 0, 1, 3), elem(3, 1, 2, 3)] {
            let moved = gamma
                .matmul(&probe)
                .unwrap()
                .matmul(&gamma.inverse().unwrap())
                .unwrap();
            assert_eq!(
                conj.contains(&moved).unwrap(),
                oracle.contains(&probe).unwrap()
            );
        }
    }

    #[test]
    fn crt_intersection_of_principals() {
        let g2 = CongruenceOracle::principal(3, 2);
        let g3 = CongruenceOracle::principal(3, 3);
        let both = g2.intersect(&g3, 1 << 20).unwrap();
        assert_eq!(both.m, 6);
        assert_eq!(both.closure_order(), 1);
        let g6 = CongruenceOracle::principal(3, 6);
        assert!(both.same_subgroup(&g6));
        let flipped = g3.intersect(&g2, 1 << 20).unwrap();
        assert!(flipped.same_subgroup(&both));
    }

    #[test]
    fn same_modulus_intersection() {
        let gens1 = vec![ModMatrix::from_entries(2, 5, &[1, 1, 0, 1])];
        let gens2 = vec![ModMatrix::from_entries(2, 5, &[1, 0, 1, 1])];
        let o1 = CongruenceOracle::new(2, 5, gens1, 1 << 20).unwrap();
        let o2 = CongruenceOracle::new(2, 5, gens2, 1 << 20).unwrap();
        let both = o1.intersect(&o2, 1 << 20).unwrap();
        assert_eq!(
            both.closure_order(),
            o1.closure().intersection(o2.closure()).count()
        );
        let idem = o1.intersect(&o1, 1 << 20).unwrap();
        assert!(idem.same_subgroup(&o1));
    }

    #[test]
    fn index_multiplicative_under_crt() {
        let gens1 = vec![ModMatrix::from_entries(2, 2, &[1, 1, 0, 1])];
        let o1 = CongruenceOracle::new(2, 2, gens1, 1 << 20).unwrap();
        let o2 = CongruenceOracle::principal(2, 3);
        let both = o1.intersect(&o2, 1 << 20).unwrap();
        let i1 = o1.index(1 << 20).unwrap();
        let i2 = o2.index(1 << 20).unwrap();
        assert_eq!(both.index(1 << 20).unwrap(), i1 * i2);
    }

    #[test]
    fn lcm_intersection_of_principals() {
        // moduli 4 and 6 are neither equal nor coprime; the filtered
        // enumeration at the lcm must give the modulus-12 principal
        let g4 = CongruenceOracle::principal(2, 4);
        let g6 = CongruenceOracle::principal(2, 6);
        let meet = g4.intersect(&g6, 1 << 20).unwrap();
        assert_eq!(meet.m, 12);
        assert!(meet.same_subgroup(&CongruenceOracle::principal(2, 12)));
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            group_order_mod(3, 2, 10),
            Err(CongruenceError::BudgetExceeded { budget: 10 })
        ));
    }
}
