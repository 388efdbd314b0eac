//! The `SL_n` calculus: elementary matrices, their commutator formula,
//! Bruhat decomposition over `Q`, the double-commutator identity and
//! the power formula.
//!
//! Indices on elementary matrices are 1-based, matching the usual
//! `e_{i,j}^k` notation; conversion to 0-based matrix entries happens
//! at the boundary.

use crate::matrix::MatrixError;
use crate::{Matrix, Rational, RationalMatrix};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlnError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("ambient sizes differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("opposite pair (i,j) = (j',i'): the commutator formula excludes it")]
    OppositePair,
    #[error("power formula hypothesis violated: {0} does not commute with [x^-1, y^-1]")]
    HypothesisViolated(&'static str),
    #[error("matrix is not upper unitriangular")]
    NotUnitriangular,
}

/// `e_{i,j}^k`: identity plus `k` in position `(i, j)`, `i != j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementaryMatrix {
    pub n: usize,
    pub i: usize,
    pub j: usize,
    #[serde(with = "crate::textio::rational_string")]
    pub k: Rational,
}

impl ElementaryMatrix {
    pub fn new(n: usize, i: usize, j: usize, k: Rational) -> Self {
        assert!(
            (1..=n).contains(&i) && (1..=n).contains(&j) && i != j,
            "elementary indices must be distinct and within 1..=n"
        );
        ElementaryMatrix { n, i, j, k }
    }

    pub fn from_int(n: usize, i: usize, j: usize, k: i64) -> Self {
        Self::new(n, i, j, Rational::from_integer(k.into()))
    }

    pub fn to_matrix(&self) -> RationalMatrix {
        Matrix::elementary(self.n, self.i - 1, self.j - 1, self.k.clone())
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.n, self.i, self.j, -self.k.clone())
    }

    pub fn is_identity(&self) -> bool {
        self.k.is_zero()
    }
}

impl fmt::Display for ElementaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e[{},{}]^({})", self.i, self.j, self.k)
    }
}

/// Result of the elementary commutator formula: either another
/// elementary matrix or the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementaryOrIdentity {
    Elementary(ElementaryMatrix),
    Identity(usize),
}

impl ElementaryOrIdentity {
    pub fn to_matrix(&self) -> RationalMatrix {
        match self {
            ElementaryOrIdentity::Elementary(e) => e.to_matrix(),
            ElementaryOrIdentity::Identity(n) => RationalMatrix::identity(*n),
        }
    }
}

/// The three-case commutator formula
/// `[e_{i,j}^k, e_{i',j'}^{k'}]` = `e_{i,j'}^{kk'}` if `j = i'`,
/// `e_{i',j}^{-kk'}` if `i = j'`, identity otherwise. The opposite pair
/// `(i,j) = (j',i')` is rejected rather than guessed, and the result is
/// checked against direct matrix arithmetic before being returned.
pub fn elementary_commutator(
    a: &ElementaryMatrix,
    b: &ElementaryMatrix,
) -> Result<ElementaryOrIdentity, SlnError> {
    if a.n != b.n {
        return Err(SlnError::AmbientMismatch(a.n, b.n));
    }
    if a.i == b.j && a.j == b.i {
        return Err(SlnError::OppositePair);
    }
    let result = if a.j == b.i {
        ElementaryOrIdentity::Elementary(ElementaryMatrix::new(
            a.n,
            a.i,
            b.j,
            a.k.clone() * b.k.clone(),
        ))
    } else if a.i == b.j {
        ElementaryOrIdentity::Elementary(ElementaryMatrix::new(
            a.n,
            b.i,
            a.j,
            -(a.k.clone() * b.k.clone()),
        ))
    } else {
        ElementaryOrIdentity::Identity(a.n)
    };
    let direct = a.to_matrix().commutator(&b.to_matrix())?;
    assert_eq!(
        direct,
        result.to_matrix(),
        "commutator formula disagrees with matrix arithmetic for {a} and {b}"
    );
    Ok(result)
}

/// Monomial part of a Bruhat form: permutation with column signs.
///
/// Column `j` holds `signs[j]` in row `sigma[j]` (0-based internally;
/// `sigma_one_based` exposes the usual convention). When the
/// permutation is odd a single `-1` is placed in the second column so
/// the determinant is 1; all other signs produced by a decomposition
/// are folded into the diagonal part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPermutationMatrix {
    pub n: usize,
    sigma: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutationMatrix {
    /// Canonical representative with determinant 1.
    pub fn from_permutation(sigma: Vec<usize>) -> Self {
        let n = sigma.len();
        let mut seen = vec![false; n];
        for &s in &sigma {
            assert!(s < n && !seen[s], "not a permutation");
            seen[s] = true;
        }
        let mut signs = vec![1i8; n];
        if permutation_sign(&sigma) < 0 {
            assert!(n >= 2);
            signs[1] = -1;
        }
        SignedPermutationMatrix { n, sigma, signs }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_permutation((0..n).collect())
    }

    /// sigma(j), 0-based.
    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    /// sigma(j) in 1-based indexing.
    pub fn sigma_one_based(&self, j: usize) -> usize {
        self.sigma[j - 1] + 1
    }

    pub fn sign(&self, j: usize) -> i8 {
        self.signs[j]
    }

    pub fn to_matrix(&self) -> RationalMatrix {
        let mut m = RationalMatrix::zero(self.n, self.n);
        for j in 0..self.n {
            m[(self.sigma[j], j)] = Rational::from_integer(self.signs[j].into());
        }
        m
    }

    pub fn is_identity_permutation(&self) -> bool {
        self.sigma.iter().enumerate().all(|(j, &s)| s == j)
    }

    /// Cycle notation on 1-based points, fixed points omitted; the
    /// identity prints as `()`.
    pub fn cycle_notation(&self) -> String {
        let mut seen = vec![false; self.n];
        let mut out = String::new();
        for start in 0..self.n {
            if seen[start] || self.sigma[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut next = self.sigma[start];
            while next != start {
                seen[next] = true;
                cycle.push(next);
                next = self.sigma[next];
            }
            out.push('(');
            out.push_str(
                &cycle
                    .iter()
                    .map(|p| (p + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

fn permutation_sign(sigma: &[usize]) -> i8 {
    let mut seen = vec![false; sigma.len()];
    let mut sign = 1i8;
    for start in 0..sigma.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = sigma[cur];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// The quadruple `(v, d, sigma, u)` with `g = v * d * p_sigma * u`,
/// `v, u` upper unitriangular and `d` diagonal.
///
/// The split is canonical: `u` carries only the coordinates moved to
/// negative roots by `sigma` (entries `(i,j)`, `i < j`, with
/// `sigma(i) > sigma(j)`), which makes the quadruple unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruhatForm {
    pub v: RationalMatrix,
    pub d: Vec<Rational>,
    pub sigma: SignedPermutationMatrix,
    pub u: RationalMatrix,
}

impl BruhatForm {
    pub fn diagonal_matrix(&self) -> RationalMatrix {
        RationalMatrix::diagonal(&self.d)
    }

    /// `v * d * p_sigma * u`, exactly.
    pub fn recompose(&self) -> RationalMatrix {
        let m = &(&self.v * &self.diagonal_matrix()) * &self.sigma.to_matrix();
        &m * &self.u
    }

    /// The monomial middle `d * p_sigma`.
    pub fn monomial(&self) -> RationalMatrix {
        &self.diagonal_matrix() * &self.sigma.to_matrix()
    }
}

/// Bruhat decomposition of an invertible rational matrix by exact row
/// and column elimination with elementary operations only.
///
/// Column pivots are chosen bottom-most first, which is exactly what
/// determines the Weyl component of the cell; the output is then
/// canonicalized so `u` lives in `U ∩ p_sigma^-1 U^- p_sigma`.
pub fn bruhat_decompose(g: &RationalMatrix) -> Result<BruhatForm, SlnError> {
    if !g.is_square() {
        return Err(MatrixError::NotSquare(g.rows(), g.cols()).into());
    }
    let n = g.rows();
    let mut a = g.clone();
    // v accumulates the inverses of the row operations, u those of the
    // column operations.
    let mut v = RationalMatrix::identity(n);
    let mut u = RationalMatrix::identity(n);
    let mut sigma = vec![usize::MAX; n];
    let mut used = vec![false; n];

    for col in 0..n {
        let pivot_row = (0..n)
            .rev()
            .find(|&r| !used[r] && !a[(r, col)].is_zero())
            .ok_or(MatrixError::Singular)?;
        sigma[col] = pivot_row;
        used[pivot_row] = true;
        let pivot = a[(pivot_row, col)].clone();
        // clear the column above the pivot (unused rows only; used rows
        // are already zero here)
        for r in 0..pivot_row {
            if used[r] || a[(r, col)].is_zero() {
                continue;
            }
            let factor = a[(r, col)].clone() / pivot.clone();
            // A <- e_{r,pivot_row}^{-factor} A, so v gains e_{r,pivot_row}^{factor}
            for c in 0..n {
                let d = a[(pivot_row, c)].clone() * factor.clone();
                a[(r, c)] -= d;
            }
            let vcol: Vec<Rational> = (0..n).map(|i| v[(i, r)].clone()).collect();
            for i in 0..n {
                let d = vcol[i].clone() * factor.clone();
                v[(i, pivot_row)] += d;
            }
        }
        // clear the pivot row to the right
        for c in col + 1..n {
            if a[(pivot_row, c)].is_zero() {
                continue;
            }
            let factor = a[(pivot_row, c)].clone() / pivot.clone();
            // A <- A e_{col,c}^{-factor}, so u gains e_{col,c}^{factor} on the left
            for r in 0..n {
                let d = a[(r, col)].clone() * factor.clone();
                a[(r, c)] -= d;
            }
            let urow: Vec<Rational> = (0..n).map(|j| u[(c, j)].clone()).collect();
            for j in 0..n {
                let d = urow[j].clone() * factor.clone();
                u[(col, j)] += d;
            }
        }
    }

    let perm = SignedPermutationMatrix::from_permutation(sigma.clone());
    let mut d = vec![Rational::zero(); n];
    for j in 0..n {
        let pivot = a[(sigma[j], j)].clone();
        let sign = Rational::from_integer(perm.sign(j).into());
        d[sigma[j]] = pivot / sign;
    }

    let form = canonicalize(BruhatForm {
        v,
        d,
        sigma: perm,
        u,
    })?;
    debug_assert_eq!(form.recompose(), *g);
    Ok(form)
}

/// Move the part of `u` supported on positions fixed to positive roots
/// by `sigma` across the monomial middle into `v`.
fn canonicalize(form: BruhatForm) -> Result<BruhatForm, SlnError> {
    let n = form.u.rows();
    let sigma = form.sigma.sigma().to_vec();
    let mut u1 = RationalMatrix::identity(n);
    let mut residual = form.u.clone();

    // Peel positions by increasing height so each multiplication only
    // disturbs higher positions.
    for h in 1..n {
        for i in 0..n - h {
            let j = i + h;
            if sigma[i] < sigma[j] && !residual[(i, j)].is_zero() {
                let e = RationalMatrix::elementary(n, i, j, residual[(i, j)].clone());
                u1 = &u1 * &e;
                residual = &e.inverse()? * &residual;
            }
        }
    }
    debug_assert!(residual.is_upper_unitriangular());
    debug_assert!(
        (0..n).all(|i| { (i + 1..n).all(|j| residual[(i, j)].is_zero() || sigma[i] > sigma[j]) })
    );

    let m = form.monomial();
    let transported = &(&m * &u1) * &m.inverse()?;
    debug_assert!(transported.is_upper_unitriangular());
    Ok(BruhatForm {
        v: &form.v * &transported,
        d: form.d,
        sigma: form.sigma,
        u: residual,
    })
}

/// Both sides of the double-commutator identity
/// `[[delta, e_{1,n}^k], v a v^-1] = v [e_{sigma(1),sigma(n)}^q, a] v^-1`
/// where `q = s k d_{sigma(1)} / d_{sigma(n)}` and `s` is the sign the
/// monomial part contributes when conjugating `e_{1,n}`.
///
/// The two sides are computed independently (the left from `delta`
/// directly, the right from its Bruhat form), asserted equal, and
/// returned for inspection. With commutator convention
/// `[x, y] = x y x^-1 y^-1` the identity holds for every
/// `delta` in `SL_n(Q)`, every upper unitriangular `a` and every `k`.
pub fn double_commutator_identity(
    delta: &RationalMatrix,
    k: &Rational,
    a: &RationalMatrix,
) -> Result<(RationalMatrix, RationalMatrix), SlnError> {
    if !a.is_upper_unitriangular() {
        return Err(SlnError::NotUnitriangular);
    }
    let n = delta.rows();
    assert!(n >= 2, "ambient size must be at least 2");
    let form = bruhat_decompose(delta)?;

    let e1n = RationalMatrix::elementary(n, 0, n - 1, k.clone());
    let inner = delta
        .matmul(&e1n)?
        .matmul(&delta.inverse()?)?
        .matmul(&e1n.inverse()?)?;
    let vav = form.v.matmul(a)?.matmul(&form.v.inverse()?)?;
    let lhs = inner.commutator(&vav)?;

    // conjugate of e_{1,n}^k by the monomial part d p_sigma
    let s1 = form.sigma.sign(0) as i64;
    let sn = form.sigma.sign(n - 1) as i64;
    let top = form.sigma.sigma()[0];
    let bottom = form.sigma.sigma()[n - 1];
    let ratio = form.d[top].clone() / form.d[bottom].clone();
    let q = Rational::from_integer((s1 * sn).into()) * ratio * k.clone();
    let e_conj = RationalMatrix::elementary(n, top, bottom, q);
    let rhs = form
        .v
        .matmul(&e_conj.commutator(a)?)?
        .matmul(&form.v.inverse()?)?;

    assert_eq!(lhs, rhs, "double-commutator identity failed: defect");
    Ok((lhs, rhs))
}

/// Both sides of `(xy)^p = x^p y^p [x^-1, y^-1]^{p(1-p)/2}`, which holds
/// whenever `x` and `y` both commute with `[x^-1, y^-1]`. The
/// hypothesis is checked exactly and its violation is an error; once it
/// holds, inequality of the two sides would be a defect.
pub fn power_formula_check(
    x: &RationalMatrix,
    y: &RationalMatrix,
    p: i64,
) -> Result<(RationalMatrix, RationalMatrix), SlnError> {
    // [x^-1, y^-1] = x^-1 y^-1 x y
    let c = x.inverse()?.matmul(&y.inverse()?)?.matmul(x)?.matmul(y)?;
    if x.matmul(&c)? != c.matmul(x)? {
        return Err(SlnError::HypothesisViolated("x"));
    }
    if y.matmul(&c)? != c.matmul(y)? {
        return Err(SlnError::HypothesisViolated("y"));
    }
    let lhs = x.matmul(y)?.pow(p)?;
    let exponent = p * (1 - p) / 2;
    let rhs = x.pow(p)?.matmul(&y.pow(p)?)?.matmul(&c.pow(exponent)?)?;
    assert_eq!(
        lhs, rhs,
        "power formula failed under verified hypothesis: defect"
    );
    Ok((lhs, rhs))
}

/// Serialize a Bruhat form in the matrix text format: four blocks
/// (v, d, p, u) separated by blank lines, then the permutation in cycle
/// notation.
pub fn print_bruhat(form: &BruhatForm) -> String {
    let mut out = String::new();
    out.push_str(&crate::textio::print_matrix(&form.v));
    out.push('\n');
    out.push_str(&crate::textio::print_matrix(&form.diagonal_matrix()));
    out.push('\n');
    out.push_str(&crate::textio::print_matrix(&form.sigma.to_matrix()));
    out.push('\n');
    out.push_str(&crate::textio::print_matrix(&form.u));
    out.push('\n');
    out.push_str(&format!("sigma: {}\n", form.sigma.cycle_notation()));
    out
}

/// Clear the denominator of an elementary matrix's exponent by raising
/// it to the denominator power: `(e_{i,j}^{p/q})^q = e_{i,j}^p`.
pub fn clear_denominator(e: &ElementaryMatrix) -> ElementaryMatrix {
    let numer = e.k.numer().clone();
    ElementaryMatrix::new(e.n, e.i, e.j, Rational::from_integer(numer))
}
