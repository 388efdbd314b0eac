//! Derivation engine: produces elementary matrices inside a
//! congruence-defined subgroup of `SL_n(Z)` by the double-commutator
//! construction, propagates them to every off-diagonal position, and
//! certifies the full-support hypothesis of the finite-index
//! criterion. Also climbs to the center of unitriangular subgroups.
//!
//! Every step is replayed against the membership oracle as it is
//! produced, and the whole run is recorded in a transcript that can be
//! re-verified and re-run byte-identically.

use crate::matrix::MatrixError;
use crate::oracles::{CongruenceError, CongruenceOracle, ModMatrix, SubgroupSpec};
use crate::sln::{bruhat_decompose, BruhatForm, ElementaryMatrix};
use crate::textio::{denominator_lcm, is_integral, print_matrix};
use crate::{Integer, Rational, RationalMatrix, SCHEMA_VERSION};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DeriveError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error("search budget {budget} exhausted at stage {stage} (frontier size {frontier})")]
    BudgetExhausted {
        stage: &'static str,
        budget: usize,
        frontier: usize,
    },
    #[error("witness budget {budget} exhausted at position ({i},{j})")]
    PositionBudget { i: usize, j: usize, budget: u64 },
    #[error("subgroup contains only central elements ({explored} explored)")]
    CentralOnly { explored: usize },
    #[error("seed element is not a member of the subgroup")]
    NotAMember,
    #[error("element is not upper unitriangular over Z")]
    NotUnitriangular,
    #[error("start element is the identity")]
    TrivialStart,
    #[error("transcript is malformed: {0}")]
    BadTranscript(String),
    #[error("the derivation pipeline needs ambient size at least 3 (got {0})")]
    AmbientTooSmall(usize),
}

/// Membership in a subgroup of `SL_n(Z)` the engine can query. Inputs
/// that are not integral determinant-one matrices are simply not
/// members.
pub trait LatticeMembership {
    fn ambient(&self) -> usize;
    fn member(&self, g: &RationalMatrix) -> bool;
    /// Replayable membership evidence, printed.
    fn evidence(&self, g: &RationalMatrix) -> String;
}

impl LatticeMembership for CongruenceOracle {
    fn ambient(&self) -> usize {
        self.n
    }

    fn member(&self, g: &RationalMatrix) -> bool {
        matches!(self.contains(g), Ok(true))
    }

    fn evidence(&self, g: &RationalMatrix) -> String {
        match ModMatrix::from_integer_matrix(g, self.m) {
            Ok(r) => format!("residue mod {}: {:?}", self.m, r.entries()),
            Err(_) => "non-integral".into(),
        }
    }
}

/// The subgroup `v^-1 Delta v ∩ SL_n(Z)` for a congruence-defined
/// `Delta` and a rational conjugator `v`.
///
/// Membership of an integral `x` only depends on `x` modulo
/// `m * D^2`, where `D` clears the denominators of `v` and `v^-1`, so
/// this is again a congruence condition at an enlarged modulus; it is
/// evaluated here directly through the conjugation.
#[derive(Debug, Clone)]
pub struct ConjugatedLattice {
    pub base: CongruenceOracle,
    pub v: RationalMatrix,
    v_inv: RationalMatrix,
}

impl ConjugatedLattice {
    pub fn new(base: CongruenceOracle, v: RationalMatrix) -> Result<Self, DeriveError> {
        let v_inv = v.inverse()?;
        Ok(ConjugatedLattice { base, v, v_inv })
    }

    /// The enlarged modulus through which membership factors.
    pub fn effective_modulus(&self) -> Integer {
        let d = num_integer::lcm(denominator_lcm(&self.v), denominator_lcm(&self.v_inv));
        Integer::from(self.base.m) * d.clone() * d
    }
}

impl LatticeMembership for ConjugatedLattice {
    fn ambient(&self) -> usize {
        self.base.n
    }

    fn member(&self, g: &RationalMatrix) -> bool {
        if !is_integral(g) {
            return false;
        }
        let conj = match self.v.matmul(g).and_then(|x| x.matmul(&self.v_inv)) {
            Ok(c) => c,
            Err(_) => return false,
        };
        matches!(self.base.contains(&conj), Ok(true))
    }

    fn evidence(&self, g: &RationalMatrix) -> String {
        match self.v.matmul(g).and_then(|x| x.matmul(&self.v_inv)) {
            Ok(conj) => format!("conjugate:\n{}", print_matrix(&conj)),
            Err(_) => "conjugation failed".into(),
        }
    }
}

/// One recorded rule application.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptStep {
    pub rule: String,
    pub inputs: Vec<String>,
    pub produced: String,
    pub certificate: String,
}

/// Outcome of a derivation run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Certified {
        /// position "i,j" (1-based) to the derived exponent
        positions: BTreeMap<String, String>,
    },
    Failure {
        reason: String,
    },
}

/// Full record of a derivation: embedded configuration, ordered steps
/// with membership certificates, and the outcome. Reruns with the same
/// configuration serialize byte-identically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationTranscript {
    pub schema_version: u32,
    pub subgroup: SubgroupSpec,
    pub witness_budget: u64,
    pub search_budget: usize,
    pub steps: Vec<TranscriptStep>,
    pub outcome: Outcome,
}

/// A big-cell element of the subgroup together with its Bruhat data.
#[derive(Debug, Clone)]
pub struct BigCellElement {
    pub element: RationalMatrix,
    pub form: BruhatForm,
    pub explored: usize,
}

fn is_central_sl(g: &RationalMatrix) -> bool {
    // center of SL_n(Z) is {I, -I} (the latter only for even n)
    let n = g.rows();
    let one = Rational::one();
    let neg = -Rational::one();
    let diag = &g[(0, 0)];
    if *diag != one && *diag != neg {
        return false;
    }
    (0..n).all(|i| {
        (0..n).all(|j| {
            g[(i, j)]
                == if i == j {
                    diag.clone()
                } else {
                    Rational::zero()
                }
        })
    })
}

/// Default generator set searched for big-cell elements: integral lifts
/// of the image generators plus the elementary matrices at the modulus
/// power (all of which lie in the subgroup).
pub fn default_search_generators(oracle: &CongruenceOracle) -> Vec<RationalMatrix> {
    let n = oracle.n;
    let mut gens = Vec::new();
    for img in oracle.image_generators() {
        let lift = RationalMatrix::from_fn(n, n, |i, j| {
            Rational::from_integer((img.entry(i, j) as i64).into())
        });
        if lift.det().ok() == Some(Rational::one()) {
            gens.push(lift);
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                for sign in [1i64, -1] {
                    gens.push(RationalMatrix::elementary(
                        n,
                        i,
                        j,
                        Rational::from_integer((sign * oracle.m as i64).into()),
                    ));
                }
            }
        }
    }
    gens
}

/// Search short products of the given generators for an element of the
/// subgroup whose Bruhat permutation moves 1. Generators are
/// oracle-verified before use; an exhausted frontier consisting only of
/// central elements reports the central-only branch.
pub fn find_big_cell_element(
    oracle: &CongruenceOracle,
    generators: &[RationalMatrix],
    search_budget: usize,
) -> Result<BigCellElement, DeriveError> {
    let n = oracle.n;
    if n < 3 {
        return Err(DeriveError::AmbientTooSmall(n));
    }
    let mut seen: Vec<RationalMatrix> = vec![RationalMatrix::identity(n)];
    let mut frontier: Vec<RationalMatrix> = vec![RationalMatrix::identity(n)];
    let mut explored = 0usize;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for base in &frontier {
            for g in generators {
                let cand = base.matmul(g)?;
                if seen.contains(&cand) {
                    continue;
                }
                seen.push(cand.clone());
                explored += 1;
                if explored > search_budget {
                    return Err(DeriveError::BudgetExhausted {
                        stage: "big-cell-search",
                        budget: search_budget,
                        frontier: frontier.len() + next.len(),
                    });
                }
                if !oracle.member(&cand) {
                    continue;
                }
                if is_central_sl(&cand) {
                    next.push(cand);
                    continue;
                }
                let form = bruhat_decompose(&cand).map_err(|_| DeriveError::NotAMember)?;
                if form.sigma.sigma()[0] != 0 {
                    return Ok(BigCellElement {
                        element: cand,
                        form,
                        explored,
                    });
                }
                next.push(cand);
            }
        }
        frontier = next;
    }
    // the closure of the search generators was exhausted; if nothing
    // non-central ever appeared the subgroup fragment is central
    if seen.iter().all(is_central_sl) {
        Err(DeriveError::CentralOnly { explored })
    } else {
        Err(DeriveError::BudgetExhausted {
            stage: "big-cell-search",
            budget: search_budget,
            frontier: 0,
        })
    }
}

/// Result of the double-commutator production step: an integral
/// elementary matrix in `v^-1 Delta v`, the conjugator, and the
/// transported membership handle for the remaining steps.
pub struct DerivedSeed {
    pub elementary: ElementaryMatrix,
    pub conjugator: RationalMatrix,
    pub transported: ConjugatedLattice,
    pub steps: Vec<TranscriptStep>,
}

/// Execute the double-commutator construction on a big-cell element:
/// search witness exponents `k, m` for which the two nested commutators
/// are oracle members, identify the result as a conjugated elementary
/// matrix, clear its denominator by exponentiation, and transport the
/// oracle through the conjugator.
pub fn derive_elementary(
    oracle: &CongruenceOracle,
    cell: &BigCellElement,
    witness_budget: u64,
) -> Result<DerivedSeed, DeriveError> {
    let n = oracle.n;
    let delta = &cell.element;
    let form = &cell.form;
    let sigma = form.sigma.sigma();
    assert!(sigma[0] != 0, "big-cell precondition: sigma(1) != 1");
    let mut steps = Vec::new();

    // first witness: delta_1 = [delta, e_{1,n}^k] in Delta
    let mut first: Option<(u64, RationalMatrix)> = None;
    for k in 1..=witness_budget {
        let e = RationalMatrix::elementary(n, 0, n - 1, Rational::from_integer((k as i64).into()));
        let cand = delta.commutator(&e)?;
        if oracle.member(&cand) {
            steps.push(TranscriptStep {
                rule: "inner-commutator-witness".into(),
                inputs: vec![format!("k = {k}")],
                produced: print_matrix(&cand),
                certificate: oracle.evidence(&cand),
            });
            first = Some((k, cand));
            break;
        }
    }
    let (k_witness, delta_1) = first.ok_or(DeriveError::PositionBudget {
        i: 1,
        j: n,
        budget: witness_budget,
    })?;

    // branch on sigma(n): choose the unipotent partner position
    let sigma_1 = sigma[0]; // 0-based image of 1
    let sigma_n = sigma[n - 1];
    let (t_col, out_pos) = if sigma_n != 0 {
        // a = e_{1, sigma(1)}, output lands at (1, sigma(n))
        (sigma_1, (0usize, sigma_n))
    } else {
        // sigma(n) = 1: a = e_{1, j} for some j != 1, sigma(1); output at (sigma(1), j)
        let j = (1..n)
            .find(|&j| j != sigma_1)
            .expect("n >= 3 leaves a free column");
        (j, (sigma_1, j))
    };

    // integral conjugated one-parameter element w = v e_{1,t}^{l0} v^-1
    let e_unit = RationalMatrix::elementary(n, 0, t_col, Rational::one());
    let v_inv = form.v.inverse()?;
    let conj_unit = form.v.matmul(&e_unit)?.matmul(&v_inv)?;
    let rank_one = conj_unit.sub_mat(&RationalMatrix::identity(n))?;
    let l0 = denominator_lcm(&rank_one);
    let w = RationalMatrix::identity(n)
        .add_mat(&rank_one.scale(&Rational::from_integer(l0.clone())))?;
    assert!(is_integral(&w), "denominator clearing failed: defect");

    // second witness: u_1 = [delta_1, w^m] in Delta
    let mut second: Option<(u64, RationalMatrix)> = None;
    let mut w_power = w.clone();
    for m in 1..=witness_budget {
        let cand = delta_1.commutator(&w_power)?;
        if oracle.member(&cand) && !cand.is_identity() {
            steps.push(TranscriptStep {
                rule: "double-commutator-witness".into(),
                inputs: vec![format!("m = {m}"), format!("l0 = {l0}")],
                produced: print_matrix(&cand),
                certificate: oracle.evidence(&cand),
            });
            second = Some((m, cand));
            break;
        }
        if m < witness_budget {
            w_power = w_power.matmul(&w)?;
        }
    }
    let (m_witness, u_1) = second.ok_or(DeriveError::PositionBudget {
        i: out_pos.0 + 1,
        j: out_pos.1 + 1,
        budget: witness_budget,
    })?;

    // identify u_1 = v e_{pos}^c v^-1 and check the exponent against
    // the double-commutator identity
    let pulled = v_inv.matmul(&u_1)?.matmul(&form.v)?;
    let mut c = None;
    'scan: for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if !pulled[(i, j)].is_zero() {
                let candidate = RationalMatrix::elementary(n, i, j, pulled[(i, j)].clone());
                if candidate == pulled {
                    assert_eq!((i, j), out_pos, "commutator landed off-position: defect");
                    c = Some(pulled[(i, j)].clone());
                    break 'scan;
                }
            }
        }
    }
    let c = c.expect("double commutator must produce an elementary matrix: defect");
    // predicted exponent from the Bruhat data
    let s = Rational::from_integer(((form.sigma.sign(0) * form.sigma.sign(n - 1)) as i64).into());
    let ratio = form.d[sigma[0]].clone() / form.d[sigma[n - 1]].clone();
    let q = s * ratio * Rational::from_integer((k_witness as i64).into());
    let l_total =
        Rational::from_integer(l0.clone()) * Rational::from_integer((m_witness as i64).into());
    let predicted = if sigma_n != 0 {
        -(q.clone() * l_total.clone())
    } else {
        q.clone() * l_total.clone()
    };
    assert_eq!(c, predicted, "exponent disagrees with the identity: defect");
    steps.push(TranscriptStep {
        rule: "bruhat-conjugate-identification".into(),
        inputs: vec![print_matrix(&u_1)],
        produced: format!("e[{},{}]^({})", out_pos.0 + 1, out_pos.1 + 1, c),
        certificate: format!("conjugator:\n{}", print_matrix(&form.v)),
    });

    // clear the denominator by exponentiation: (e^c)^den = e^{numer}
    let fractional = ElementaryMatrix::new(n, out_pos.0 + 1, out_pos.1 + 1, c.clone());
    let seed = crate::sln::clear_denominator(&fractional);
    assert!(!seed.k.is_zero());
    let transported = ConjugatedLattice::new(oracle.clone(), form.v.clone())?;
    let seed_matrix = seed.to_matrix();
    assert!(
        transported.member(&seed_matrix),
        "cleared seed must lie in the transported lattice: defect"
    );
    steps.push(TranscriptStep {
        rule: "denominator-clearing".into(),
        inputs: vec![format!("exponent {}", c), format!("power {}", c.denom())],
        produced: format!("e[{},{}]^({})", seed.i, seed.j, seed.k),
        certificate: transported.evidence(&seed_matrix),
    });
    steps.push(TranscriptStep {
        rule: "lattice-transport".into(),
        inputs: vec![print_matrix(&form.v)],
        produced: format!("membership modulus {}", transported.effective_modulus()),
        certificate: "conjugated congruence condition".into(),
    });

    Ok(DerivedSeed {
        elementary: seed,
        conjugator: form.v.clone(),
        transported,
        steps,
    })
}

/// Close a seed elementary matrix under the commutator formula with
/// oracle-verified witness exponents until every off-diagonal position
/// carries one, or report the first position that exhausts the budget.
pub fn propagate(
    handle: &dyn LatticeMembership,
    seed: &ElementaryMatrix,
    witness_budget: u64,
) -> Result<(BTreeMap<(usize, usize), Integer>, Vec<TranscriptStep>), DeriveError> {
    let n = handle.ambient();
    let seed_matrix = seed.to_matrix();
    if !handle.member(&seed_matrix) {
        return Err(DeriveError::NotAMember);
    }
    let seed_exp = seed.k.numer().clone();
    assert!(seed.k.is_integer() && !seed_exp.is_zero());

    let mut found: BTreeMap<(usize, usize), Integer> = BTreeMap::new();
    let mut steps = Vec::new();
    found.insert((seed.i, seed.j), seed_exp);

    loop {
        let mut progressed = false;
        let known: Vec<((usize, usize), Integer)> =
            found.iter().map(|(&p, r)| (p, r.clone())).collect();
        for ((i, j), r) in known {
            for t in 1..=n {
                // row fill: [e_{i,j}^r, e_{j,t}^k] = e_{i,t}^{rk}
                if t != i && t != j && !found.contains_key(&(i, t)) {
                    if let Some((exp, step)) =
                        fill_position(handle, (i, j, r.clone()), (j, t), (i, t), witness_budget)?
                    {
                        found.insert((i, t), exp);
                        steps.push(step);
                        progressed = true;
                    }
                }
                // column fill: [e_{t,i}^k, e_{i,j}^r] = e_{t,j}^{kr}
                if t != i && t != j && !found.contains_key(&(t, j)) {
                    if let Some((exp, step)) =
                        fill_position(handle, (i, j, r.clone()), (t, i), (t, j), witness_budget)?
                    {
                        found.insert((t, j), exp);
                        steps.push(step);
                        progressed = true;
                    }
                }
            }
        }
        let complete = (1..=n).all(|i| (1..=n).all(|j| i == j || found.contains_key(&(i, j))));
        if complete {
            return Ok((found, steps));
        }
        if !progressed {
            let missing = (1..=n)
                .flat_map(|i| (1..=n).map(move |j| (i, j)))
                .find(|&(i, j)| i != j && !found.contains_key(&(i, j)))
                .unwrap();
            return Err(DeriveError::PositionBudget {
                i: missing.0,
                j: missing.1,
                budget: witness_budget,
            });
        }
    }
}

fn fill_position(
    handle: &dyn LatticeMembership,
    known: (usize, usize, Integer),
    partner: (usize, usize),
    target: (usize, usize),
    witness_budget: u64,
) -> Result<Option<(Integer, TranscriptStep)>, DeriveError> {
    let (ki, kj, r) = known;
    for k in 1..=witness_budget {
        let exp = r.clone() * Integer::from(k);
        let sign = if kj == partner.0 {
            Integer::one()
        } else {
            -Integer::one()
        };
        let exp = exp * sign;
        let cand = ElementaryMatrix::new(
            handle.ambient(),
            target.0,
            target.1,
            Rational::from_integer(exp.clone()),
        );
        let mat = cand.to_matrix();
        if handle.member(&mat) {
            let step = TranscriptStep {
                rule: "commutator-propagation".into(),
                inputs: vec![
                    format!("e[{},{}]^({})", ki, kj, r),
                    format!("e[{},{}]^({})", partner.0, partner.1, k),
                ],
                produced: format!("e[{},{}]^({})", target.0, target.1, exp),
                certificate: handle.evidence(&mat),
            };
            return Ok(Some((exp, step)));
        }
    }
    Ok(None)
}

/// The checkable finite-index hypothesis: every off-diagonal position
/// carries a nonzero exponent whose elementary matrix the oracle
/// re-verifies as a member.
pub fn tits_certificate(
    handle: &dyn LatticeMembership,
    found: &BTreeMap<(usize, usize), Integer>,
) -> bool {
    let n = handle.ambient();
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            match found.get(&(i, j)) {
                None => return false,
                Some(r) if r.is_zero() => return false,
                Some(r) => {
                    let e = ElementaryMatrix::new(n, i, j, Rational::from_integer(r.clone()));
                    if !handle.member(&e.to_matrix()) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Upper unitriangular over Z with unit diagonal.
fn is_unitriangular_int(g: &RationalMatrix) -> bool {
    g.is_upper_unitriangular() && is_integral(g)
}

/// Center membership in the unitriangular group: only the corner
/// position may be nonzero.
fn is_central_unitriangular(g: &RationalMatrix) -> bool {
    let n = g.rows();
    for i in 0..n {
        for j in i + 1..n {
            if (i, j) != (0, n - 1) && !g[(i, j)].is_zero() {
                return false;
            }
        }
    }
    true
}

/// Descend the lower central series of `U_n(Z)` from a nontrivial
/// member by oracle-witnessed commutators with simple elementary
/// generators, ending at a nontrivial central element `e_{1,n}^k`.
///
/// Commutators with powers of a non-commuting generator are nontrivial
/// for every exponent: the group is torsion-free nilpotent, so the
/// centralizer of a generator equals the centralizer of each of its
/// powers. That is what keeps the descent from dying.
pub fn climb_center(
    handle: &dyn LatticeMembership,
    start: &RationalMatrix,
    witness_budget: u64,
) -> Result<(RationalMatrix, Vec<TranscriptStep>), DeriveError> {
    let n = handle.ambient();
    if !is_unitriangular_int(start) {
        return Err(DeriveError::NotUnitriangular);
    }
    if start.is_identity() {
        return Err(DeriveError::TrivialStart);
    }
    if !handle.member(start) {
        return Err(DeriveError::NotAMember);
    }
    let mut current = start.clone();
    let mut steps = Vec::new();
    loop {
        if is_central_unitriangular(&current) {
            return Ok((current, steps));
        }
        // find a simple generator that does not commute with us
        let witness_gen = (0..n - 1).find(|&a| {
            let e = RationalMatrix::elementary(n, a, a + 1, Rational::one());
            current.commutator(&e).map(|c| !c.is_identity()) == Ok(true)
        });
        let a = witness_gen.expect("non-central element must move some simple generator");
        let mut advanced = false;
        for k in 1..=witness_budget {
            let e =
                RationalMatrix::elementary(n, a, a + 1, Rational::from_integer((k as i64).into()));
            let cand = current.commutator(&e)?;
            assert!(
                !cand.is_identity(),
                "commutator with a power of a moving generator vanished: defect"
            );
            if handle.member(&cand) {
                steps.push(TranscriptStep {
                    rule: "center-climb-step".into(),
                    inputs: vec![
                        format!("generator e[{},{}]", a + 1, a + 2),
                        format!("k = {k}"),
                    ],
                    produced: print_matrix(&cand),
                    certificate: handle.evidence(&cand),
                });
                current = cand;
                advanced = true;
                break;
            }
        }
        if !advanced {
            return Err(DeriveError::PositionBudget {
                i: a + 1,
                j: a + 2,
                budget: witness_budget,
            });
        }
    }
}

/// Run the whole pipeline on a congruence subgroup and record it.
pub fn run_pipeline(
    spec: &SubgroupSpec,
    witness_budget: u64,
    search_budget: usize,
    closure_budget: usize,
) -> Result<DerivationTranscript, DeriveError> {
    let oracle = match spec
        .build(closure_budget)
        .map_err(|e| DeriveError::BadTranscript(e.to_string()))?
    {
        crate::oracles::SubgroupHandle::Congruence(o) => o,
        _ => {
            return Err(DeriveError::BadTranscript(
                "derivation requires a congruence subgroup".into(),
            ))
        }
    };
    let mut steps = Vec::new();
    let outcome =
        (|| -> Result<(Vec<TranscriptStep>, BTreeMap<(usize, usize), Integer>), DeriveError> {
            let gens = default_search_generators(&oracle);
            let cell = find_big_cell_element(&oracle, &gens, search_budget)?;
            let mut all = vec![TranscriptStep {
                rule: "big-cell-search".into(),
                inputs: vec![format!("explored {}", cell.explored)],
                produced: print_matrix(&cell.element),
                certificate: format!("sigma: {}", cell.form.sigma.cycle_notation()),
            }];
            let seed = derive_elementary(&oracle, &cell, witness_budget)?;
            all.extend(seed.steps.clone());
            let (positions, prop_steps) =
                propagate(&seed.transported, &seed.elementary, witness_budget)?;
            all.extend(prop_steps);
            let certified = tits_certificate(&seed.transported, &positions);
            all.push(TranscriptStep {
                rule: "full-support-check".into(),
                inputs: vec![format!("positions {}", positions.len())],
                produced: format!("certified: {certified}"),
                certificate: "all positions re-verified against the oracle".into(),
            });
            assert!(
                certified,
                "propagation completed but certificate failed: defect"
            );
            Ok((all, positions))
        })();

    let transcript = match outcome {
        Ok((all, positions)) => {
            steps.extend(all);
            DerivationTranscript {
                schema_version: SCHEMA_VERSION,
                subgroup: spec.clone(),
                witness_budget,
                search_budget,
                steps,
                outcome: Outcome::Certified {
                    positions: positions
                        .into_iter()
                        .map(|((i, j), r)| (format!("{i},{j}"), r.to_string()))
                        .collect(),
                },
            }
        }
        Err(e) => DerivationTranscript {
            schema_version: SCHEMA_VERSION,
            subgroup: spec.clone(),
            witness_budget,
            search_budget,
            steps,
            outcome: Outcome::Failure {
                reason: e.to_string(),
            },
        },
    };
    Ok(transcript)
}

/// Re-run a transcript's embedded configuration and compare the fresh
/// serialization byte-for-byte.
pub fn replay_transcript(
    transcript: &DerivationTranscript,
    closure_budget: usize,
) -> Result<bool, DeriveError> {
    let fresh = run_pipeline(
        &transcript.subgroup,
        transcript.witness_budget,
        transcript.search_budget,
        closure_budget,
    )?;
    let original =
        serde_json::to_string(transcript).map_err(|e| DeriveError::BadTranscript(e.to_string()))?;
    let rerun =
        serde_json::to_string(&fresh).map_err(|e| DeriveError::BadTranscript(e.to_string()))?;
    Ok(original == rerun)
}
