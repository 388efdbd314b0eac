//! Projective dynamics over binary64: proximality analysis by power
//! iteration, general position of vector families, and numeric
//! fixed-point obstruction certificates.
//!
//! Everything here is numeric with explicit tolerances, deliberately
//! separate from the exact modules: certificates carry their tolerances
//! and are labeled as numeric evidence, never merged with exact
//! verdicts. General position is the exception: for rational input it
//! is decided by exact rank computations.

use crate::{FloatMatrix, Matrix, Rational, RationalMatrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectiveError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("tolerance must be positive")]
    BadTolerance,
    #[error("expected {expected} vectors of dimension {dim}, got {got}")]
    WrongCardinality {
        expected: usize,
        dim: usize,
        got: usize,
    },
    #[error("x is not fixed by the subgroup generators (moved by {0})")]
    XNotFixed(usize),
    #[error("gamma has no attracting projective limit within tolerance")]
    NoAttractor,
    #[error("x lies on the repelling hyperplane")]
    XOnRepellingHyperplane,
    #[error("matrix is singular")]
    Singular,
}

/// Point of real projective space: unit vector with the first nonzero
/// coordinate positive. Normalization is idempotent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePoint {
    pub coords: Vec<f64>,
}

impl ProjectivePoint {
    pub fn new(v: &[f64]) -> Self {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm > 0.0, "projective point needs a nonzero vector");
        let mut coords: Vec<f64> = v.iter().map(|x| x / norm).collect();
        if let Some(first) = coords.iter().find(|x| x.abs() > 1e-14) {
            if *first < 0.0 {
                for c in coords.iter_mut() {
                    *c = -*c;
                }
            }
        }
        ProjectivePoint { coords }
    }

    /// Sine of the angle between the lines: `|u ∧ v| / (|u||v|)`.
    pub fn distance(&self, other: &ProjectivePoint) -> f64 {
        let dot: f64 = self
            .coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| a * b)
            .sum();
        (1.0 - (dot * dot).min(1.0)).max(0.0).sqrt()
    }

    pub fn apply(&self, g: &FloatMatrix) -> ProjectivePoint {
        ProjectivePoint::new(&g.apply(&self.coords))
    }
}

/// Proximality data: dominant simple eigenvalue, its attracting point,
/// a basis of the complementary invariant hyperplane, and the modulus
/// ratio of the second eigenvalue to the first (< 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProximalData {
    pub top_eigenvalue: f64,
    pub attracting: ProjectivePoint,
    pub repelling_basis: Vec<Vec<f64>>,
    /// left eigenvector cutting out the repelling hyperplane
    pub repelling_normal: Vec<f64>,
    pub gap: f64,
    pub tolerance: f64,
}

impl ProximalData {
    /// Signed distance of a projective point from the repelling
    /// hyperplane (normalized pairing with the left eigenvector).
    pub fn distance_from_repelling(&self, x: &ProjectivePoint) -> f64 {
        let num: f64 = self
            .repelling_normal
            .iter()
            .zip(x.coords.iter())
            .map(|(a, b)| a * b)
            .sum();
        let norm = self
            .repelling_normal
            .iter()
            .map(|a| a * a)
            .sum::<f64>()
            .sqrt();
        (num / norm).abs()
    }
}

const POWER_ITERATIONS: usize = 4000;
const RESIDUAL_EPS: f64 = 1e-12;

/// Power-iterate `g` from a seed; `Some((|lambda|, sign, direction))`
/// when the iterate becomes an eigenvector up to a relative residual of
/// `RESIDUAL_EPS`. The residual is linear in the angle error, so this
/// detects convergence to full precision, unlike a test on consecutive
/// directions.
fn power_iterate(g: &FloatMatrix, seed: &[f64]) -> Option<(f64, f64, Vec<f64>)> {
    let mut v = seed.to_vec();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    for it in 0..POWER_ITERATIONS {
        let w = g.apply(&v);
        let wnorm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if wnorm < 1e-300 {
            return None;
        }
        // signed Rayleigh quotient (v is unit)
        let rayleigh: f64 = v.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
        let residual: f64 = w
            .iter()
            .zip(v.iter())
            .map(|(wi, vi)| (wi - rayleigh * vi).powi(2))
            .sum::<f64>()
            .sqrt();
        if it > 4 && residual <= RESIDUAL_EPS * wnorm {
            let sign = if rayleigh >= 0.0 { 1.0 } else { -1.0 };
            let dir: Vec<f64> = w.iter().map(|x| x / wnorm).collect();
            return Some((rayleigh.abs(), sign, dir));
        }
        v = w.iter().map(|x| x / wnorm).collect();
    }
    None
}

/// Asymptotic growth rate `|g^t seed|^(1/t)`, measurable even when the
/// direction oscillates (complex or sign-flipping dominant part).
fn growth_rate(g: &FloatMatrix, seed: &[f64]) -> f64 {
    let mut v = seed.to_vec();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    for x in v.iter_mut() {
        *x /= norm;
    }
    let mut acc = 0.0f64;
    let burn = 200;
    let steps = 600;
    for it in 0..burn + steps {
        let w = g.apply(&v);
        let wnorm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if wnorm < 1e-300 {
            return 0.0;
        }
        if it >= burn {
            acc += wnorm.ln();
        }
        v = w.iter().map(|x| x / wnorm).collect();
    }
    (acc / steps as f64).exp()
}

/// Proximality analysis: `Some(ProximalData)` when `g` has a simple
/// strictly dominant eigenvalue with relative gap above `tol`, `None`
/// otherwise.
///
/// Deterministic seed vectors (the standard basis sweep) feed the power
/// iteration; a dominant eigenspace of dimension two or more, or a
/// dominant complex pair, shows up either as two non-parallel converged
/// directions of maximal modulus or as a non-converging seed of maximal
/// growth, and both reject.
pub fn proximal_analyze(
    g: &FloatMatrix,
    tol: f64,
) -> Result<Option<ProximalData>, ProjectiveError> {
    if !g.is_square() {
        return Err(ProjectiveError::NotSquare);
    }
    if tol <= 0.0 {
        return Err(ProjectiveError::BadTolerance);
    }
    let n = g.rows();

    let mut converged: Vec<(f64, f64, Vec<f64>)> = Vec::new();
    let mut unresolved_growth: Vec<f64> = Vec::new();
    for s in 0..n {
        let mut seed = vec![0.0; n];
        seed[s] = 1.0;
        match power_iterate(g, &seed) {
            Some(hit) => converged.push(hit),
            None => unresolved_growth.push(growth_rate(g, &seed)),
        }
    }
    let top = converged.iter().map(|(m, ..)| *m).fold(0.0f64, f64::max);
    if top == 0.0 {
        return Ok(None);
    }
    // any non-converging seed growing at the top rate means the
    // dominant part is not a simple real eigenvalue
    if unresolved_growth.iter().any(|gr| *gr >= top * (1.0 - tol)) {
        return Ok(None);
    }
    // all converged directions at the top modulus must be parallel
    let top_dirs: Vec<&(f64, f64, Vec<f64>)> = converged
        .iter()
        .filter(|(m, ..)| *m >= top * (1.0 - tol))
        .collect();
    let reference = ProjectivePoint::new(&top_dirs[0].2);
    for other in &top_dirs[1..] {
        if reference.distance(&ProjectivePoint::new(&other.2)) > 1e-8 {
            return Ok(None);
        }
    }
    let (modulus, sign, direction) = (top_dirs[0].0, top_dirs[0].1, top_dirs[0].2.clone());
    let lambda = sign * modulus;
    let attracting = ProjectivePoint::new(&direction);

    // residual check: attracting must be an eigenvector within tolerance
    let image = g.apply(&attracting.coords);
    let residual: f64 = image
        .iter()
        .zip(attracting.coords.iter())
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt();
    if residual > tol.max(1e-9) * modulus.max(1.0) * 10.0 {
        return Ok(None);
    }

    // left eigenvector via the transpose
    let gt = g.transpose();
    let mut left = None;
    for s in 0..n {
        let mut seed = vec![0.0; n];
        seed[s] = 1.0;
        if let Some((m, _, dir)) = power_iterate(&gt, &seed) {
            if m >= top * (1.0 - tol) {
                left = Some(dir);
                break;
            }
        }
    }
    let left = match left {
        Some(l) => l,
        None => return Ok(None),
    };

    // second eigenvalue via deflation g' = g - lambda a b^T / (b^T a)
    let bta: f64 = left
        .iter()
        .zip(attracting.coords.iter())
        .map(|(a, b)| a * b)
        .sum();
    if bta.abs() < 1e-12 {
        return Ok(None);
    }
    let deflated = Matrix::from_fn(n, n, |i, j| {
        g[(i, j)] - lambda * attracting.coords[i] * left[j] / bta
    });
    let mut second = 0.0f64;
    for s in 0..n {
        let mut seed = vec![0.0; n];
        seed[s] = 1.0;
        let rate = match power_iterate(&deflated, &seed) {
            Some((m, ..)) => m,
            None => growth_rate(&deflated, &seed),
        };
        second = second.max(rate);
    }
    let gap = second / modulus;
    if gap >= 1.0 - tol {
        return Ok(None);
    }

    // hyperplane basis: orthogonal complement of the left eigenvector
    let repelling_basis = orthogonal_complement(&left);
    Ok(Some(ProximalData {
        top_eigenvalue: lambda,
        attracting,
        repelling_basis,
        repelling_normal: left,
        gap,
        tolerance: tol,
    }))
}

fn orthogonal_complement(normal: &[f64]) -> Vec<Vec<f64>> {
    let n = normal.len();
    let norm2: f64 = normal.iter().map(|x| x * x).sum();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for s in 0..n {
        let mut v = vec![0.0; n];
        v[s] = 1.0;
        // project out the normal, then the existing basis
        let coeff: f64 = normal.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<f64>() / norm2;
        for (vi, ni) in v.iter_mut().zip(normal.iter()) {
            *vi -= coeff * ni;
        }
        for b in &basis {
            let c: f64 = b.iter().zip(v.iter()).map(|(a, x)| a * x).sum();
            for (vi, bi) in v.iter_mut().zip(b.iter()) {
                *vi -= c * bi;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
        if basis.len() == n - 1 {
            break;
        }
    }
    basis
}

/// General position: `n+1` vectors in dimension `n` such that every
/// n-element subset is linearly independent. Exact over the rationals.
pub fn general_position(vectors: &[Vec<Rational>]) -> Result<bool, ProjectiveError> {
    if vectors.is_empty() {
        return Err(ProjectiveError::WrongCardinality {
            expected: 1,
            dim: 0,
            got: 0,
        });
    }
    let dim = vectors[0].len();
    if vectors.len() != dim + 1 || vectors.iter().any(|v| v.len() != dim) {
        return Err(ProjectiveError::WrongCardinality {
            expected: dim + 1,
            dim,
            got: vectors.len(),
        });
    }
    for skip in 0..vectors.len() {
        let rows: Vec<Rational> = vectors
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .flat_map(|(_, v)| v.iter().cloned())
            .collect();
        let m = RationalMatrix::new(dim, dim, rows);
        if m.rank() < dim {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Iteration limits and tolerance for obstruction certificates.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ObstructionParams {
    pub tol: f64,
    pub max_iterations: usize,
    /// orbit indices checked beyond the entry index
    pub horizon: usize,
}

impl Default for ObstructionParams {
    fn default() -> Self {
        ObstructionParams {
            tol: 1e-9,
            max_iterations: 5000,
            horizon: 200,
        }
    }
}

/// Numeric certificate witnessing that a direction cannot be recurrent:
/// the orbit `gamma^n x` enters and stays in a ball around the limit
/// `y` that a subgroup generator moves completely off itself.
///
/// All quantities carry the tolerance they were computed at; this is
/// numeric evidence, not an exact verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObstructionCertificate {
    /// index of the generator that moves the limit point
    pub witness_generator: usize,
    pub limit: ProjectivePoint,
    /// separation radius: the witness maps B(limit, radius) off itself
    pub radius: f64,
    /// a Lipschitz bound for the witness on projective space
    pub lipschitz: f64,
    /// orbit entry index: `gamma^n x` stays in the ball from here on
    pub entry_index: usize,
    /// last orbit index verified
    pub verified_through: usize,
    pub tolerance: f64,
}

/// Lipschitz bound for the projective action in the sine metric:
/// `|Λ²g|_F * |g^-1|_F^2` (an overestimate).
fn projective_lipschitz(g: &FloatMatrix) -> Result<f64, ProjectiveError> {
    let n = g.rows();
    let mut wedge_frob = 0.0f64;
    for i in 0..n {
        for k in i + 1..n {
            for j in 0..n {
                for l in j + 1..n {
                    let minor = g[(i, j)] * g[(k, l)] - g[(i, l)] * g[(k, j)];
                    wedge_frob += minor * minor;
                }
            }
        }
    }
    let inv = g.inverse().map_err(|_| ProjectiveError::Singular)?;
    let inv_frob: f64 = inv.entries().iter().map(|x| x * x).sum();
    Ok(wedge_frob.sqrt() * inv_frob)
}

/// Try to produce an obstruction certificate for `(delta_gens, gamma, x)`:
/// requires `x` fixed by every generator, an attracting limit for the
/// `gamma`-orbit of `x` (from proximality data when available, from
/// direct orbit convergence otherwise), and a generator moving the
/// limit. `Ok(None)` when no generator moves the limit (the
/// obstruction hypothesis fails there).
pub fn fixed_point_obstruction(
    delta_gens: &[FloatMatrix],
    gamma: &FloatMatrix,
    x: &ProjectivePoint,
    params: ObstructionParams,
) -> Result<Option<ObstructionCertificate>, ProjectiveError> {
    if params.tol <= 0.0 {
        return Err(ProjectiveError::BadTolerance);
    }
    // hypothesis: every generator fixes x
    for (idx, d) in delta_gens.iter().enumerate() {
        if x.apply(d).distance(x) > params.tol {
            return Err(ProjectiveError::XNotFixed(idx));
        }
    }

    // limit of the gamma-orbit of x: use proximality data when the
    // matrix is proximal; otherwise detect direct orbit convergence
    // (unipotent directions still converge projectively)
    let limit = match proximal_analyze(gamma, params.tol)? {
        Some(data) => {
            if data.distance_from_repelling(x) < params.tol {
                return Err(ProjectiveError::XOnRepellingHyperplane);
            }
            data.attracting
        }
        None => {
            // non-proximal directions (unipotent ones in particular) can
            // still converge projectively, if only polynomially fast;
            // compare two horizons and accept a coarse limit; the ball
            // verification below is the real check, at a macroscopic
            // radius
            let mut cur = x.clone();
            for _ in 0..params.max_iterations {
                cur = cur.apply(gamma);
            }
            let halfway = cur.clone();
            for _ in 0..params.max_iterations {
                cur = cur.apply(gamma);
            }
            if halfway.distance(&cur) > 1e-3 {
                return Err(ProjectiveError::NoAttractor);
            }
            cur
        }
    };

    // a generator that moves the limit
    let witness = delta_gens
        .iter()
        .enumerate()
        .map(|(i, d)| (i, limit.apply(d).distance(&limit)))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    let (witness_generator, moved) = match witness {
        Some((i, dist)) if dist > params.tol * 100.0 => (i, dist),
        _ => return Ok(None),
    };

    // separation radius: delta maps B(y, r) into B(delta y, L r), so any
    // r with (L + 1) r < d(y, delta y) separates the two balls
    let lipschitz = projective_lipschitz(&delta_gens[witness_generator])?;
    let radius = moved / (lipschitz + 2.0);

    // entry index and verification horizon
    let mut cur = x.clone();
    let mut entry = None;
    for n in 1..=params.max_iterations {
        cur = cur.apply(gamma);
        if cur.distance(&limit) < radius / 2.0 {
            entry = Some(n);
            break;
        }
    }
    let entry_index = entry.ok_or(ProjectiveError::NoAttractor)?;
    let verified_through = entry_index + params.horizon;
    for _ in entry_index..verified_through {
        cur = cur.apply(gamma);
        if cur.distance(&limit) > radius {
            return Err(ProjectiveError::NoAttractor);
        }
    }

    Ok(Some(ObstructionCertificate {
        witness_generator,
        limit,
        radius,
        lipschitz,
        entry_index,
        verified_through,
        tolerance: params.tol,
    }))
}

/// Re-run the orbit of a certificate and confirm every checked index
/// keeps the orbit inside the certified ball, and that the witness
/// still separates it.
pub fn replay_obstruction(
    delta_gens: &[FloatMatrix],
    gamma: &FloatMatrix,
    x: &ProjectivePoint,
    cert: &ObstructionCertificate,
) -> bool {
    let witness = &delta_gens[cert.witness_generator];
    let moved = cert.limit.apply(witness).distance(&cert.limit);
    if (cert.lipschitz + 1.0) * cert.radius >= moved {
        return false;
    }
    let mut cur = x.clone();
    for n in 1..=cert.verified_through {
        cur = cur.apply(gamma);
        if n >= cert.entry_index && cur.distance(&cert.limit) > cert.radius {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fmat(n: usize, vals: &[f64]) -> FloatMatrix {
        Matrix::new(n, n, vals.to_vec())
    }

    fn rat(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    #[test]
    fn diagonal_proximal_case() {
        let g = fmat(3, &[2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.5]);
        let data = proximal_analyze(&g, 1e-9).unwrap().unwrap();
        assert!((data.top_eigenvalue - 2.0).abs() < 1e-9);
        assert!((data.gap - 0.5).abs() < 1e-9);
        let e1 = ProjectivePoint::new(&[1.0, 0.0, 0.0]);
        assert!(data.attracting.distance(&e1) < 1e-9);
        assert_eq!(data.repelling_basis.len(), 2);
    }

    #[test]
    fn repeated_dominant_eigenvalue_is_not_proximal() {
        let g = fmat(3, &[2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.25]);
        assert!(proximal_analyze(&g, 1e-9).unwrap().is_none());
    }

    #[test]
    fn sign_tied_moduli_are_not_proximal() {
        let g = fmat(2, &[2.0, 0.0, 0.0, -2.0]);
        assert!(proximal_analyze(&g, 1e-9).unwrap().is_none());
    }

    #[test]
    fn rotation_is_not_proximal() {
        let g = fmat(2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(proximal_analyze(&g, 1e-9).unwrap().is_none());
    }

    #[test]
    fn conjugated_attractor_transport() {
        // h diag(2,1,1/2) h^-1 with h = e_{2,1}: attracting moves to [h e1]
        let d = fmat(3, &[2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.5]);
        let h = fmat(3, &[1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let hinv = fmat(3, &[1.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let g = &(&h * &d) * &hinv;
        let data = proximal_analyze(&g, 1e-9).unwrap().unwrap();
        let expected = ProjectivePoint::new(&[1.0, 1.0, 0.0]);
        assert!(data.attracting.distance(&expected) < 1e-6);
        assert!((data.gap - 0.5).abs() < 1e-6);
    }

    #[test]
    fn negative_dominant_eigenvalue_is_proximal() {
        let g = fmat(2, &[-3.0, 0.0, 0.0, 1.0]);
        let data = proximal_analyze(&g, 1e-9).unwrap().unwrap();
        assert!((data.top_eigenvalue + 3.0).abs() < 1e-9);
    }

    #[test]
    fn general_position_cases() {
        let e = |i: usize| {
            let mut v = vec![rat(0, 1); 3];
            v[i] = rat(1, 1);
            v
        };
        let sum = vec![rat(1, 1), rat(1, 1), rat(1, 1)];
        assert!(general_position(&[e(0), e(1), e(2), sum.clone()]).unwrap());
        let partial = vec![rat(1, 1), rat(1, 1), rat(0, 1)];
        assert!(!general_position(&[e(0), e(1), e(2), partial]).unwrap());
        // wrong cardinality
        assert!(general_position(&[e(0), e(1)]).is_err());
    }

    #[test]
    fn general_position_scaling_and_permutation_invariant() {
        let v: Vec<Vec<Rational>> = vec![
            vec![rat(1, 1), rat(0, 1), rat(2, 3)],
            vec![rat(0, 1), rat(5, 2), rat(1, 1)],
            vec![rat(1, 7), rat(0, 1), rat(1, 1)],
            vec![rat(1, 1), rat(1, 1), rat(1, 1)],
        ];
        let base = general_position(&v).unwrap();
        let mut scaled = v.clone();
        for (i, vi) in scaled.iter_mut().enumerate() {
            let c = rat(i as i64 + 2, 3);
            for x in vi.iter_mut() {
                *x *= c.clone();
            }
        }
        assert_eq!(general_position(&scaled).unwrap(), base);
        let mut permuted = v.clone();
        permuted.reverse();
        assert_eq!(general_position(&permuted).unwrap(), base);
    }

    #[test]
    fn obstruction_for_unipotent_direction() {
        // the one-parameter subgroup fixing [e1], probed along the
        // opposite unipotent: gamma^n [e1] = [e1 + n e2] tends to [e2],
        // which the generator moves
        let delta = vec![fmat(2, &[1.0, 1.0, 0.0, 1.0])];
        let gamma = fmat(2, &[1.0, 0.0, 1.0, 1.0]);
        let x = ProjectivePoint::new(&[1.0, 0.0]);
        let cert = fixed_point_obstruction(&delta, &gamma, &x, ObstructionParams::default())
            .unwrap()
            .expect("certificate exists");
        let e2 = ProjectivePoint::new(&[0.0, 1.0]);
        // the fallback limit is coarse (polynomial convergence); the
        // separation ball is macroscopic, so this is plenty
        assert!(cert.limit.distance(&e2) < 1e-3);
        assert!(cert.radius > 0.0);
        assert!(replay_obstruction(&delta, &gamma, &x, &cert));
    }

    #[test]
    fn no_certificate_when_nothing_moves() {
        // trivial subgroup fixes everything
        let delta = vec![fmat(2, &[1.0, 0.0, 0.0, 1.0])];
        let gamma = fmat(2, &[2.0, 0.0, 0.0, 0.5]);
        let x = ProjectivePoint::new(&[1.0, 1.0]);
        let out =
            fixed_point_obstruction(&delta, &gamma, &x, ObstructionParams::default()).unwrap();
        assert!(out.is_none());
    }

    #[test]
    fn no_certificate_when_limit_is_fixed() {
        // x is already the attractor and the generator fixes it
        let delta = vec![fmat(2, &[1.0, 1.0, 0.0, 1.0])];
        let gamma = fmat(2, &[2.0, 0.0, 0.0, 0.5]);
        let x = ProjectivePoint::new(&[1.0, 0.0]);
        let out =
            fixed_point_obstruction(&delta, &gamma, &x, ObstructionParams::default()).unwrap();
        assert!(out.is_none());
    }

    #[test]
    fn hypothesis_failures_are_reported() {
        let delta = vec![fmat(2, &[1.0, 1.0, 0.0, 1.0])];
        let gamma = fmat(2, &[2.0, 0.0, 0.0, 0.5]);
        // x not fixed by the generator
        let x = ProjectivePoint::new(&[0.0, 1.0]);
        assert!(matches!(
            fixed_point_obstruction(&delta, &gamma, &x, ObstructionParams::default()),
            Err(ProjectiveError::XNotFixed(0))
        ));
        // x on the repelling hyperplane of a proximal gamma
        let fix_both = vec![
            fmat(2, &[1.0, 0.0, 0.0, 1.0]),
            fmat(2, &[1.0, 1.0, 0.0, 1.0]),
        ];
        let _ = fix_both;
        let delta2 = vec![fmat(2, &[1.0, 0.0, 0.0, 1.0])];
        let x2 = ProjectivePoint::new(&[0.0, 1.0]);
        assert!(matches!(
            fixed_point_obstruction(&delta2, &gamma, &x2, ObstructionParams::default()),
            Err(ProjectiveError::XOnRepellingHyperplane)
        ));
    }

    #[test]
    fn contraction_toward_attractor() {
        // off the repelling hyperplane the orbit contracts to the
        // attractor at roughly the gap rate
        let g = fmat(3, &[2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.5]);
        let data = proximal_analyze(&g, 1e-9).unwrap().unwrap();
        let mut x = ProjectivePoint::new(&[0.3, 0.9, 0.1]);
        for _ in 0..10 {
            x = x.apply(&g);
        }
        let mut prev = x.distance(&data.attracting);
        for _ in 0..10 {
            x = x.apply(&g);
            let next = x.distance(&data.attracting);
            assert!(next <= prev * 0.6 + 1e-12, "contraction violated");
            prev = next;
        }
    }
}
