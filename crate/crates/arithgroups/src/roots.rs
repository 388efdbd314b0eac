//! Crystallographic root systems: enumeration by reflection closure,
//! bases and positive systems, highest roots, and paths through
//! adjacent bases.
//!
//! Roots are integer coordinate vectors in a fixed ambient lattice with
//! an integer Gram pairing: `A_n` lives in the sum-zero sublattice of
//! `Z^{n+1}` with the standard dot product, `B_2`/`C_2`/`D_n` use the
//! standard dot product on `Z^n`, `G_2` uses simple-root coordinates on
//! `Z^2` with the pairing scaled to integers, and `F_4` uses doubled
//! coordinates so the half-integer roots become integral. Everything is
//! exact; no radicals appear anywhere.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("unsupported root system {0}{1}")]
    Unsupported(TypeLabel, usize),
    #[error("roots are parallel")]
    ParallelRoots,
    #[error("bases belong to different root systems")]
    SystemMismatch,
    #[error("not a valid base of this root system")]
    InvalidBase,
    #[error("vector is not a root of this system")]
    NotARoot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypeLabel {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for TypeLabel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "A" | "a" => Ok(TypeLabel::A),
            "B" | "b" => Ok(TypeLabel::B),
            "C" | "c" => Ok(TypeLabel::C),
            "D" | "d" => Ok(TypeLabel::D),
            "E" | "e" => Ok(TypeLabel::E),
            "F" | "f" => Ok(TypeLabel::F),
            "G" | "g" => Ok(TypeLabel::G),
            _ => Err(format!("unknown type label {s:?}")),
        }
    }
}

pub type RootVec = Vec<i64>;

/// A finite crystallographic root system, closed under negation and
/// under all of its own reflections. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSystem {
    pub type_label: TypeLabel,
    pub rank: usize,
    ambient: usize,
    roots: Vec<RootVec>,
    index: HashMap<RootVec, usize>,
    gram: Vec<Vec<i64>>,
    simple: Vec<usize>,
    cartan: Vec<Vec<i64>>,
}

impl RootSystem {
    /// Construct the root system of the given type and rank by closing
    /// the simple roots under reflections.
    ///
    /// Supported: `A_n` (n >= 1), `B_2`, `C_2`, `D_n` (n >= 4),
    /// `F_4`, `G_2`.
    pub fn build(type_label: TypeLabel, rank: usize) -> Result<Self, RootError> {
        let (simple, gram): (Vec<RootVec>, Vec<Vec<i64>>) = match (type_label, rank) {
            (TypeLabel::A, n) if n >= 1 => {
                let ambient = n + 1;
                let simple = (0..n)
                    .map(|i| {
                        let mut v = vec![0i64; ambient];
                        v[i] = 1;
                        v[i + 1] = -1;
                        v
                    })
                    .collect();
                (simple, identity_gram(ambient))
            }
            (TypeLabel::B, 2) => (vec![vec![1, -1], vec![0, 1]], identity_gram(2)),
            (TypeLabel::C, 2) => (vec![vec![1, -1], vec![0, 2]], identity_gram(2)),
            (TypeLabel::D, n) if n >= 4 => {
                let mut simple: Vec<RootVec> = (0..n - 1)
                    .map(|i| {
                        let mut v = vec![0i64; n];
                        v[i] = 1;
                        v[i + 1] = -1;
                        v
                    })
                    .collect();
                let mut last = vec![0i64; n];
                last[n - 2] = 1;
                last[n - 1] = 1;
                simple.push(last);
                (simple, identity_gram(n))
            }
            (TypeLabel::F, 4) => {
                // doubled coordinates: roots of F4 scaled by 2
                let simple = vec![
                    vec![0, 2, -2, 0],
                    vec![0, 0, 2, -2],
                    vec![0, 0, 0, 2],
                    vec![1, -1, -1, -1],
                ];
                (simple, identity_gram(4))
            }
            (TypeLabel::G, 2) => {
                // simple-root coordinates; alpha_1 short, alpha_2 long
                (vec![vec![1, 0], vec![0, 1]], vec![vec![2, -3], vec![-3, 6]])
            }
            _ => return Err(RootError::Unsupported(type_label, rank)),
        };

        let ambient = simple[0].len();
        let pairing = |x: &RootVec, y: &RootVec| pair(&gram, x, y);

        // reflection closure
        let mut set: BTreeSet<RootVec> = BTreeSet::new();
        for s in &simple {
            set.insert(s.clone());
            set.insert(s.iter().map(|c| -c).collect());
        }
        loop {
            let snapshot: Vec<RootVec> = set.iter().cloned().collect();
            let before = set.len();
            for alpha in &snapshot {
                let aa = pairing(alpha, alpha);
                for beta in &snapshot {
                    let num = 2 * pairing(beta, alpha);
                    assert_eq!(num % aa, 0, "non-crystallographic pairing: defect");
                    let c = num / aa;
                    let reflected: RootVec = beta
                        .iter()
                        .zip(alpha.iter())
                        .map(|(b, a)| b - c * a)
                        .collect();
                    set.insert(reflected);
                }
            }
            if set.len() == before {
                break;
            }
        }

        let roots: Vec<RootVec> = set.into_iter().collect();
        let index: HashMap<RootVec, usize> = roots
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), i))
            .collect();
        let simple_idx: Vec<usize> = simple.iter().map(|s| index[s]).collect();

        // cartan[i][j] = 2 (alpha_i, alpha_j) / (alpha_j, alpha_j)
        let cartan = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| {
                        let num = 2 * pairing(&simple[i], &simple[j]);
                        let den = pairing(&simple[j], &simple[j]);
                        assert_eq!(num % den, 0);
                        num / den
                    })
                    .collect()
            })
            .collect();

        Ok(RootSystem {
            type_label,
            rank,
            ambient,
            roots,
            index,
            gram,
            simple: simple_idx,
            cartan,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn roots(&self) -> &[RootVec] {
        &self.roots
    }

    pub fn root(&self, idx: usize) -> &RootVec {
        &self.roots[idx]
    }

    pub fn root_count(&self) -> usize {
        self.roots.len()
    }

    pub fn root_index(&self, v: &RootVec) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn cartan_matrix(&self) -> &Vec<Vec<i64>> {
        &self.cartan
    }

    pub fn simple_root_indices(&self) -> &[usize] {
        &self.simple
    }

    pub fn pairing(&self, x: &RootVec, y: &RootVec) -> i64 {
        pair(&self.gram, x, y)
    }

    /// `<beta, alpha_check> = 2 (beta, alpha) / (alpha, alpha)`, exact.
    pub fn cartan_pairing(&self, beta: &RootVec, alpha: &RootVec) -> i64 {
        let num = 2 * self.pairing(beta, alpha);
        let den = self.pairing(alpha, alpha);
        assert_eq!(num % den, 0, "non-integral Cartan pairing: defect");
        num / den
    }

    pub fn negate(&self, idx: usize) -> usize {
        let neg: RootVec = self.roots[idx].iter().map(|c| -c).collect();
        self.index[&neg]
    }

    /// Index of `s_alpha(beta)`.
    pub fn reflect(&self, alpha: usize, beta: usize) -> usize {
        let a = &self.roots[alpha];
        let b = &self.roots[beta];
        let c = self.cartan_pairing(b, a);
        let img: RootVec = b.iter().zip(a.iter()).map(|(x, y)| x - c * y).collect();
        *self
            .index
            .get(&img)
            .expect("reflection left the root system: defect")
    }

    /// Sum of two roots if it is again a root.
    pub fn root_sum(&self, a: usize, b: usize) -> Option<usize> {
        let v: RootVec = self.roots[a]
            .iter()
            .zip(self.roots[b].iter())
            .map(|(x, y)| x + y)
            .collect();
        self.index.get(&v).copied()
    }

    pub fn is_long(&self, idx: usize) -> bool {
        let max = self.roots.iter().map(|r| self.pairing(r, r)).max().unwrap();
        self.pairing(&self.roots[idx], &self.roots[idx]) == max
    }

    /// The standard base given by the construction's simple roots.
    pub fn standard_base(&self) -> Base {
        Base::from_simple_indices(self, self.simple.clone()).expect("standard base is valid")
    }

    /// Rank-2 subsystem type spanned by two non-parallel roots: the
    /// type of `Phi` intersected with the lattice `Z alpha + Z beta`,
    /// decided by the exact intersection count.
    pub fn classify_pair(&self, alpha: &RootVec, beta: &RootVec) -> Result<Rank2Type, RootError> {
        if self.root_index(alpha).is_none() || self.root_index(beta).is_none() {
            return Err(RootError::NotARoot);
        }
        if is_rational_multiple(alpha, beta) {
            return Err(RootError::ParallelRoots);
        }
        let count = self
            .roots
            .iter()
            .filter(|r| in_lattice_of_two(alpha, beta, r))
            .count();
        Ok(match count {
            4 => Rank2Type::A1xA1,
            6 => Rank2Type::A2,
            8 => Rank2Type::B2,
            12 => Rank2Type::G2,
            other => panic!("impossible rank-2 lattice count {other}: defect"),
        })
    }

    /// JSON document: type, rank, root vectors, Cartan matrix.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "type": self.type_label.to_string(),
            "rank": self.rank,
            "roots": self.roots,
            "cartan_matrix": self.cartan,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rank2Type {
    A1xA1,
    A2,
    B2,
    G2,
}

impl fmt::Display for Rank2Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank2Type::A1xA1 => write!(f, "A1xA1"),
            Rank2Type::A2 => write!(f, "A2"),
            Rank2Type::B2 => write!(f, "B2"),
            Rank2Type::G2 => write!(f, "G2"),
        }
    }
}

fn identity_gram(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

fn pair(gram: &[Vec<i64>], x: &RootVec, y: &RootVec) -> i64 {
    let mut acc = 0;
    for (i, xi) in x.iter().enumerate() {
        if *xi == 0 {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if *yj != 0 {
                acc += xi * gram[i][j] * yj;
            }
        }
    }
    acc
}

fn is_rational_multiple(a: &RootVec, b: &RootVec) -> bool {
    // a, b nonzero integer vectors: parallel iff all 2x2 minors vanish
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if a[i] * b[j] - a[j] * b[i] != 0 {
                return false;
            }
        }
    }
    true
}

/// Is `v = c1 a + c2 b` with integer coefficients?
fn in_lattice_of_two(a: &RootVec, b: &RootVec, v: &RootVec) -> bool {
    // a, b are linearly independent, so pick coordinates i, j where the
    // 2x2 minor is nonzero and solve by Cramer's rule; then confirm on
    // all coordinates.
    let n = a.len();
    for i in 0..n {
        for j in i + 1..n {
            let det = a[i] * b[j] - a[j] * b[i];
            if det == 0 {
                continue;
            }
            let c1_num = v[i] * b[j] - v[j] * b[i];
            let c2_num = a[i] * v[j] - a[j] * v[i];
            if c1_num % det != 0 || c2_num % det != 0 {
                return false;
            }
            let (c1, c2) = (c1_num / det, c2_num / det);
            return (0..n).all(|k| c1 * a[k] + c2 * b[k] == v[k]);
        }
    }
    unreachable!("parallel roots were rejected earlier")
}

/// A base (set of simple roots) together with its derived positive
/// system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Base {
    simple: Vec<usize>,
    positive: BTreeSet<usize>,
}

impl Base {
    /// Validate and build: every root of the system must be a
    /// non-negative or non-positive integer combination of the given
    /// simple roots.
    pub fn from_simple_indices(system: &RootSystem, simple: Vec<usize>) -> Result<Self, RootError> {
        if simple.len() != system.rank {
            return Err(RootError::InvalidBase);
        }
        let mut positive = BTreeSet::new();
        for idx in 0..system.root_count() {
            match expansion_sign(system, &simple, idx) {
                Some(true) => {
                    positive.insert(idx);
                }
                Some(false) => {}
                None => return Err(RootError::InvalidBase),
            }
        }
        if positive.len() * 2 != system.root_count() {
            return Err(RootError::InvalidBase);
        }
        Ok(Base { simple, positive })
    }

    pub fn simple_indices(&self) -> &[usize] {
        &self.simple
    }

    pub fn positive_indices(&self) -> &BTreeSet<usize> {
        &self.positive
    }

    pub fn is_positive(&self, idx: usize) -> bool {
        self.positive.contains(&idx)
    }

    /// Canonical key: sorted simple-root indices.
    pub fn canonical_key(&self) -> Vec<usize> {
        let mut k = self.simple.clone();
        k.sort_unstable();
        k
    }

    /// The base adjacent to this one across the wall of the `pos`-th
    /// simple root: apply that simple reflection to every simple root.
    pub fn flip(&self, system: &RootSystem, pos: usize) -> Base {
        let alpha = self.simple[pos];
        let simple: Vec<usize> = self
            .simple
            .iter()
            .map(|&s| system.reflect(alpha, s))
            .collect();
        Base::from_simple_indices(system, simple).expect("simple reflection image is a base")
    }

    /// Height of a root with respect to this base: sum of simple-root
    /// coefficients.
    pub fn height(&self, system: &RootSystem, idx: usize) -> i64 {
        expansion(system, &self.simple, idx)
            .expect("root expands in base")
            .iter()
            .sum()
    }

    /// The unique dominance-maximal root: its coefficient vector over
    /// the simple roots dominates every other root's componentwise.
    /// Meaningful for the irreducible systems this module builds.
    pub fn highest_root(&self, system: &RootSystem) -> usize {
        let expansions: Vec<(usize, Vec<i64>)> = (0..system.root_count())
            .map(|idx| (idx, expansion(system, &self.simple, idx).unwrap()))
            .collect();
        let (best, best_exp) = expansions
            .iter()
            .max_by_key(|(_, e)| e.iter().sum::<i64>())
            .expect("nonempty root system");
        for (idx, e) in &expansions {
            if idx != best {
                assert!(
                    e.iter().zip(best_exp.iter()).all(|(a, b)| a <= b),
                    "dominance maximum is not unique: system not irreducible?"
                );
            }
        }
        *best
    }
}

/// Exact expansion of root `idx` over the given simple roots; `None`
/// if the coefficients are not integers of a single sign.
fn expansion(system: &RootSystem, simple: &[usize], idx: usize) -> Option<Vec<i64>> {
    // Solve sum_i c_i * simple_i = root over Q by elimination on an
    // ambient x rank system; coefficients must come out integral.
    use crate::Rational;
    use num_traits::{One, Zero};
    let amb = system.ambient_dim();
    let r = simple.len();
    let mut aug: Vec<Vec<Rational>> = (0..amb)
        .map(|row| {
            let mut line: Vec<Rational> = (0..r)
                .map(|c| Rational::from_integer(system.root(simple[c])[row].into()))
                .collect();
            line.push(Rational::from_integer(system.root(idx)[row].into()));
            line
        })
        .collect();

    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..r {
        let p = (row..amb).find(|&i| !aug[i][col].is_zero());
        let p = match p {
            Some(p) => p,
            None => continue,
        };
        aug.swap(row, p);
        let inv = Rational::one() / aug[row][col].clone();
        for x in aug[row].iter_mut() {
            *x *= inv.clone();
        }
        for i in 0..amb {
            if i != row && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                for c2 in 0..=r {
                    let d = aug[row][c2].clone() * f.clone();
                    aug[i][c2] -= d;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    // consistency: no pivot in the augmented column
    for line in aug.iter().skip(row) {
        if !line[r].is_zero() {
            return None;
        }
    }
    let mut coeffs = vec![Rational::zero(); r];
    for &(rw, col) in &pivots {
        coeffs[col] = aug[rw][r].clone();
    }
    let mut out = Vec::with_capacity(r);
    for c in &coeffs {
        if !c.is_integer() {
            return None;
        }
        out.push(num_traits::ToPrimitive::to_i64(&c.to_integer())?);
    }
    Some(out)
}

/// Sign of the expansion: `Some(true)` for nonnegative-nonzero,
/// `Some(false)` for nonpositive, `None` for mixed or non-integral.
fn expansion_sign(system: &RootSystem, simple: &[usize], idx: usize) -> Option<bool> {
    let e = expansion(system, simple, idx)?;
    if e.iter().all(|&c| c >= 0) && e.iter().any(|&c| c > 0) {
        Some(true)
    } else if e.iter().all(|&c| c <= 0) && e.iter().any(|&c| c < 0) {
        Some(false)
    } else {
        None
    }
}

/// Breadth-first path from `from` to `to` through adjacent bases:
/// consecutive positive systems differ by exactly one pair
/// `{alpha, -alpha}`, the flipped root is simple in the earlier base,
/// and (rank >= 2) it is never the highest root of either base.
///
/// Tie-breaking is lexicographic on the flipped simple-root position,
/// so paths are deterministic shortest ones. The search space is the
/// set of Weyl chambers, bounded by the order of the Weyl group.
pub fn adjacent_base_path(
    system: &RootSystem,
    from: &Base,
    to: &Base,
) -> Result<Vec<Base>, RootError> {
    for b in [from, to] {
        if Base::from_simple_indices(system, b.simple_indices().to_vec()).is_err() {
            return Err(RootError::SystemMismatch);
        }
    }
    if from.canonical_key() == to.canonical_key() {
        return Ok(vec![from.clone()]);
    }
    let target = to.canonical_key();
    let mut queue = VecDeque::new();
    let mut prev: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    let mut bases: HashMap<Vec<usize>, Base> = HashMap::new();
    bases.insert(from.canonical_key(), from.clone());
    let mut seen = BTreeSet::new();
    seen.insert(from.canonical_key());
    queue.push_back(from.clone());
    while let Some(base) = queue.pop_front() {
        for pos in 0..system.rank {
            let next = base.flip(system, pos);
            let key = next.canonical_key();
            if seen.insert(key.clone()) {
                prev.insert(key.clone(), base.canonical_key());
                bases.insert(key.clone(), next.clone());
                if key == target {
                    let mut path = vec![next];
                    let mut cur = base.canonical_key();
                    loop {
                        path.push(bases[&cur].clone());
                        if cur == from.canonical_key() {
                            break;
                        }
                        cur = prev[&cur].clone();
                    }
                    path.reverse();
                    validate_path(system, &path);
                    return Ok(path);
                }
                queue.push_back(next);
            }
        }
    }
    unreachable!("Weyl chambers are connected under simple flips")
}

/// The one-flip predicate plus the never-the-highest-root condition.
fn validate_path(system: &RootSystem, path: &[Base]) {
    for w in path.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let removed: Vec<usize> = a
            .positive_indices()
            .difference(b.positive_indices())
            .copied()
            .collect();
        let added: Vec<usize> = b
            .positive_indices()
            .difference(a.positive_indices())
            .copied()
            .collect();
        assert_eq!(removed.len(), 1, "adjacent step must flip exactly one root");
        assert_eq!(added.len(), 1);
        let alpha = removed[0];
        assert_eq!(system.negate(alpha), added[0]);
        assert!(
            a.simple_indices().contains(&alpha),
            "flipped root must be simple in the earlier base"
        );
        if system.rank >= 2 {
            assert_ne!(
                alpha,
                a.highest_root(system),
                "flip touched the highest root"
            );
            assert_ne!(
                alpha,
                b.highest_root(system),
                "flip touched the highest root"
            );
        }
    }
}
