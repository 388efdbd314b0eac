//! Recurrence-direction probing: searches for exponents `n` with
//! `gamma^n Delta gamma^-n = Delta` (normalizing powers) or with
//! `gamma^n F gamma^-n` inside `Delta` for a finite probe set `F`
//! (envelope witnesses), against a decidable membership oracle.
//!
//! Every reported witness carries a replayable certificate, and every
//! negative outcome is bound-relative: no operation here ever claims
//! non-recurrence, because at finite scale a failed search is not
//! evidence of anything.

use crate::oracles::{GroupElement, ModMatrix, OracleError, SubgroupHandle};
use crate::word::Word;
use crate::{Rational, RationalMatrix, SCHEMA_VERSION};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("probe set member outside the subgroup: {0}")]
    ProbeSetOutside(String),
    #[error("bounds must be at least 1")]
    BadBounds,
}

/// Search limits; every report embeds the bounds it ran under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeBounds {
    pub max_exponent: u64,
    pub ball_radius: usize,
}

impl Default for ProbeBounds {
    fn default() -> Self {
        ProbeBounds {
            max_exponent: 64,
            ball_radius: 3,
        }
    }
}

/// Outcome of a probe. `NoWitnessUpToBound` is explicitly relative to
/// the embedded bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    NormalizingPower { n: u64 },
    EnvWitnesses { witnesses: Vec<u64> },
    NoWitnessUpToBound,
}

impl Verdict {
    /// Normalizing beats envelope evidence beats none.
    pub fn strength(&self) -> u8 {
        match self {
            Verdict::NormalizingPower { .. } => 2,
            Verdict::EnvWitnesses { .. } => 1,
            Verdict::NoWitnessUpToBound => 0,
        }
    }
}

/// Replayable evidence for one conjugated membership.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// State path of the accepted walk in the folded automaton.
    AutomatonPath { path: Vec<usize> },
    /// Residue of the conjugated element modulo the oracle's modulus.
    Residue { modulus: u64, entries: Vec<u64> },
    /// Image-level equality of the conjugated subgroup (normalizing
    /// certificates); replay recomputes both inclusions.
    ImageEquality,
}

/// One verified membership `gamma^n f gamma^-n` in `Delta`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipCertificate {
    pub exponent: u64,
    /// the probed member `f`, printed
    pub member: String,
    /// the conjugated element, printed
    pub conjugate: String,
    pub evidence: Evidence,
}

/// Outcome of a recurrence-direction probe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub schema_version: u32,
    /// the direction, printed (word or matrix text)
    pub direction: String,
    pub verdict: Verdict,
    pub bounds: ProbeBounds,
    pub certificates: Vec<MembershipCertificate>,
}

fn print_element(g: &GroupElement) -> String {
    match g {
        GroupElement::Word(w) => w.to_string(),
        GroupElement::Matrix(m) => crate::textio::print_matrix(m),
    }
}

fn conjugate_element(
    power: &GroupElement,
    power_inv: &GroupElement,
    f: &GroupElement,
) -> Result<GroupElement, OracleError> {
    match (power, power_inv, f) {
        (GroupElement::Word(g), GroupElement::Word(gi), GroupElement::Word(w)) => {
            Ok(GroupElement::Word(g.concat(w).concat(gi)))
        }
        (GroupElement::Matrix(g), GroupElement::Matrix(gi), GroupElement::Matrix(m)) => {
            let prod = g
                .matmul(m)
                .and_then(|x| x.matmul(gi))
                .map_err(crate::oracles::CongruenceError::from)?;
            Ok(GroupElement::Matrix(prod))
        }
        _ => Err(OracleError::AmbientKindMismatch),
    }
}

fn multiply(a: &GroupElement, b: &GroupElement) -> Result<GroupElement, OracleError> {
    match (a, b) {
        (GroupElement::Word(x), GroupElement::Word(y)) => Ok(GroupElement::Word(x.concat(y))),
        (GroupElement::Matrix(x), GroupElement::Matrix(y)) => Ok(GroupElement::Matrix(
            x.matmul(y).map_err(crate::oracles::CongruenceError::from)?,
        )),
        _ => Err(OracleError::AmbientKindMismatch),
    }
}

fn invert(g: &GroupElement) -> Result<GroupElement, OracleError> {
    match g {
        GroupElement::Word(w) => Ok(GroupElement::Word(w.inverse())),
        GroupElement::Matrix(m) => Ok(GroupElement::Matrix(
            m.inverse().map_err(crate::oracles::CongruenceError::from)?,
        )),
    }
}

fn evidence_for(h: &SubgroupHandle, g: &GroupElement) -> Result<Evidence, OracleError> {
    match (h, g) {
        (SubgroupHandle::Free(sub), GroupElement::Word(w)) => {
            let path = sub
                .membership_path(w)
                .expect("evidence requested for a member");
            Ok(Evidence::AutomatonPath { path })
        }
        (SubgroupHandle::Congruence(o), GroupElement::Matrix(m)) => {
            let residue = ModMatrix::from_integer_matrix(m, o.m)?;
            Ok(Evidence::Residue {
                modulus: o.m,
                entries: residue.entries().to_vec(),
            })
        }
        _ => Err(OracleError::AmbientKindMismatch),
    }
}

/// All `n` in `1..=max_exponent` with `gamma^n f gamma^-n` in `Delta`
/// for every `f` in the probe set, with one certificate per verified
/// membership. Errors if the probe set is not inside `Delta`.
pub fn env_witnesses(
    h: &SubgroupHandle,
    gamma: &GroupElement,
    probe_set: &[GroupElement],
    bounds: ProbeBounds,
) -> Result<WitnessReport, ProbeError> {
    if bounds.max_exponent < 1 {
        return Err(ProbeError::BadBounds);
    }
    for f in probe_set {
        if !h.contains(f)? {
            return Err(ProbeError::ProbeSetOutside(print_element(f)));
        }
    }
    let gamma_inv = invert(gamma)?;
    let mut power = gamma.clone();
    let mut power_inv = gamma_inv.clone();
    let mut witnesses = Vec::new();
    let mut certificates = Vec::new();
    for n in 1..=bounds.max_exponent {
        let mut all_in = true;
        let mut pending = Vec::new();
        for f in probe_set {
            let conj = conjugate_element(&power, &power_inv, f)?;
            if h.contains(&conj)? {
                pending.push(MembershipCertificate {
                    exponent: n,
                    member: print_element(f),
                    conjugate: print_element(&conj),
                    evidence: evidence_for(h, &conj)?,
                });
            } else {
                all_in = false;
                break;
            }
        }
        if all_in {
            witnesses.push(n);
            certificates.extend(pending);
        }
        if n < bounds.max_exponent {
            power = multiply(&power, gamma)?;
            power_inv = multiply(&gamma_inv, &power_inv)?;
        }
    }
    let verdict = if witnesses.is_empty() {
        Verdict::NoWitnessUpToBound
    } else {
        Verdict::EnvWitnesses { witnesses }
    };
    Ok(WitnessReport {
        schema_version: SCHEMA_VERSION,
        direction: print_element(gamma),
        verdict,
        bounds,
        certificates,
    })
}

/// Least `n <= max_exponent` with `gamma^n Delta gamma^-n = Delta`,
/// both inclusions verified (set equality of congruence images,
/// canonical automaton equality for free subgroups).
pub fn normalizer_power(
    h: &SubgroupHandle,
    gamma: &GroupElement,
    bounds: ProbeBounds,
) -> Result<WitnessReport, ProbeError> {
    if bounds.max_exponent < 1 {
        return Err(ProbeError::BadBounds);
    }
    let mut power = gamma.clone();
    for n in 1..=bounds.max_exponent {
        let conjugated = h.conjugate(&power)?;
        if h.same_subgroup(&conjugated)? {
            return Ok(WitnessReport {
                schema_version: SCHEMA_VERSION,
                direction: print_element(gamma),
                verdict: Verdict::NormalizingPower { n },
                bounds,
                certificates: vec![MembershipCertificate {
                    exponent: n,
                    member: String::new(),
                    conjugate: String::new(),
                    evidence: Evidence::ImageEquality,
                }],
            });
        }
        if n < bounds.max_exponent {
            power = multiply(&power, gamma)?;
        }
    }
    Ok(WitnessReport {
        schema_version: SCHEMA_VERSION,
        direction: print_element(gamma),
        verdict: Verdict::NoWitnessUpToBound,
        bounds,
        certificates: Vec::new(),
    })
}

/// The finite ball of `Delta` probed by `direction_report`: accepted
/// words of reduced length at most the radius for free subgroups;
/// products of at most `radius` lifted generators (elementary matrices
/// to the modulus power, plus integral lifts of the image generators)
/// for congruence subgroups. Every element is oracle-verified.
pub fn probe_ball(h: &SubgroupHandle, radius: usize) -> Result<Vec<GroupElement>, ProbeError> {
    match h {
        SubgroupHandle::Free(sub) => Ok(sub
            .ball(radius)
            .into_iter()
            .map(GroupElement::Word)
            .collect()),
        SubgroupHandle::Congruence(o) => {
            let n = o.n;
            let mut gens: Vec<RationalMatrix> = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        for sign in [1i64, -1] {
                            gens.push(RationalMatrix::elementary(
                                n,
                                i,
                                j,
                                Rational::from_integer((sign * o.m as i64).into()),
                            ));
                        }
                    }
                }
            }
            for img in o.image_generators() {
                let lift = RationalMatrix::from_fn(n, n, |i, j| {
                    Rational::from_integer((img.entry(i, j) as i64).into())
                });
                if lift.det().ok() == Some(Rational::from_integer(1.into())) {
                    gens.push(lift);
                }
            }
            let mut ball: Vec<RationalMatrix> = Vec::new();
            let mut frontier = vec![RationalMatrix::identity(n)];
            for _ in 0..radius {
                let mut next = Vec::new();
                for m in &frontier {
                    for g in &gens {
                        let prod = m
                            .matmul(g)
                            .map_err(crate::oracles::CongruenceError::from)
                            .map_err(OracleError::from)?;
                        if !prod.is_identity() && !ball.contains(&prod) && !next.contains(&prod) {
                            next.push(prod);
                        }
                    }
                }
                ball.extend(next.iter().cloned());
                frontier = next;
            }
            let mut out = Vec::new();
            for m in ball {
                let e = GroupElement::Matrix(m);
                if h.contains(&e)? {
                    out.push(e);
                }
            }
            Ok(out)
        }
    }
}

/// Composite verdict with fixed ordering: a normalizing power beats
/// envelope witnesses beats a bounded failure. The fallback probes the
/// ball of radius `bounds.ball_radius` in `Delta`.
pub fn direction_report(
    h: &SubgroupHandle,
    gamma: &GroupElement,
    bounds: ProbeBounds,
) -> Result<WitnessReport, ProbeError> {
    let normalizing = normalizer_power(h, gamma, bounds)?;
    if matches!(normalizing.verdict, Verdict::NormalizingPower { .. }) {
        return Ok(normalizing);
    }
    let ball = probe_ball(h, bounds.ball_radius)?;
    if ball.is_empty() {
        return Ok(WitnessReport {
            schema_version: SCHEMA_VERSION,
            direction: print_element(gamma),
            verdict: Verdict::NoWitnessUpToBound,
            bounds,
            certificates: Vec::new(),
        });
    }
    env_witnesses(h, gamma, &ball, bounds)
}

/// Re-verify every certificate in a report against a fresh handle.
/// Returns false on any mismatch.
pub fn replay(h: &SubgroupHandle, report: &WitnessReport) -> Result<bool, ProbeError> {
    let direction = parse_element(h, &report.direction)?;
    match &report.verdict {
        Verdict::NormalizingPower { n } => {
            let mut power = direction.clone();
            for _ in 1..*n {
                power = multiply(&power, &direction)?;
            }
            let conjugated = h.conjugate(&power)?;
            Ok(h.same_subgroup(&conjugated)?)
        }
        Verdict::EnvWitnesses { witnesses } => {
            for cert in &report.certificates {
                if !witnesses.contains(&cert.exponent) {
                    return Ok(false);
                }
                let member = parse_element(h, &cert.member)?;
                let conj = parse_element(h, &cert.conjugate)?;
                // recompute the conjugation from scratch
                let mut power = direction.clone();
                for _ in 1..cert.exponent {
                    power = multiply(&power, &direction)?;
                }
                let power_inv = invert(&power)?;
                let recomputed = conjugate_element(&power, &power_inv, &member)?;
                if recomputed != conj || !h.contains(&conj)? {
                    return Ok(false);
                }
                // replay the stored evidence
                match (&cert.evidence, h, &conj) {
                    (
                        Evidence::AutomatonPath { path },
                        SubgroupHandle::Free(sub),
                        GroupElement::Word(w),
                    ) => {
                        if !sub.automaton().verify_path(w, path) {
                            return Ok(false);
                        }
                    }
                    (
                        Evidence::Residue { modulus, entries },
                        SubgroupHandle::Congruence(o),
                        GroupElement::Matrix(m),
                    ) => {
                        let residue = ModMatrix::from_integer_matrix(m, *modulus)
                            .map_err(OracleError::from)?;
                        if residue.entries() != &entries[..] || !o.contains_residue(&residue) {
                            return Ok(false);
                        }
                    }
                    _ => return Ok(false),
                }
            }
            Ok(true)
        }
        Verdict::NoWitnessUpToBound => Ok(true),
    }
}

fn parse_element(h: &SubgroupHandle, text: &str) -> Result<GroupElement, ProbeError> {
    match h {
        SubgroupHandle::Free(sub) => Ok(GroupElement::Word(
            Word::parse(text, sub.rank).map_err(|e| OracleError::BadSpec(e.to_string()))?,
        )),
        SubgroupHandle::Congruence(_) => Ok(GroupElement::Matrix(
            crate::textio::parse_matrix(text).map_err(|e| OracleError::BadSpec(e.to_string()))?,
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{CongruenceOracle, FreeSubgroup};

    fn w(s: &str) -> GroupElement {
        GroupElement::Word(Word::parse(s, 26).unwrap())
    }

    fn squares() -> SubgroupHandle {
        SubgroupHandle::Free(
            FreeSubgroup::new(
                2,
                vec![Word::parse("aa", 2).unwrap(), Word::parse("bb", 2).unwrap()],
            )
            .unwrap(),
        )
    }

    fn bounds(max: u64, radius: usize) -> ProbeBounds {
        ProbeBounds {
            max_exponent: max,
            ball_radius: radius,
        }
    }

    #[test]
    fn squares_env_witnesses_along_a_are_even() {
        let h = squares();
        let report = env_witnesses(&h, &w("a"), &[w("aa"), w("bb")], bounds(20, 3)).unwrap();
        match &report.verdict {
            Verdict::EnvWitnesses { witnesses } => {
                let expect: Vec<u64> = (1..=20).filter(|n| n % 2 == 0).collect();
                assert_eq!(witnesses, &expect);
            }
            other => panic!("unexpected verdict {other:?}"),
        }
        assert!(replay(&h, &report).unwrap());
    }

    #[test]
    fn squares_ab_direction_has_no_witness() {
        let h = squares();
        let report = env_witnesses(&h, &w("ab"), &[w("aa")], bounds(50, 3)).unwrap();
        assert_eq!(report.verdict, Verdict::NoWitnessUpToBound);
        assert_eq!(report.bounds.max_exponent, 50);
        let full = direction_report(&h, &w("ab"), bounds(50, 3)).unwrap();
        assert_eq!(full.verdict, Verdict::NoWitnessUpToBound);
    }

    #[test]
    fn probe_set_outside_is_an_error() {
        let h = squares();
        assert!(matches!(
            env_witnesses(&h, &w("a"), &[w("ab")], bounds(5, 3)),
            Err(ProbeError::ProbeSetOutside(_))
        ));
    }

    #[test]
    fn normalizer_powers_of_squares() {
        let h = squares();
        for dir in ["a", "b"] {
            let report = normalizer_power(&h, &w(dir), bounds(16, 3)).unwrap();
            assert_eq!(report.verdict, Verdict::NormalizingPower { n: 2 });
            assert!(replay(&h, &report).unwrap());
        }
        let id = normalizer_power(&h, &w(""), bounds(16, 3)).unwrap();
        assert_eq!(id.verdict, Verdict::NormalizingPower { n: 1 });
    }

    #[test]
    fn direction_report_ordering() {
        let h = squares();
        let report = direction_report(&h, &w("b"), bounds(16, 3)).unwrap();
        assert_eq!(report.verdict, Verdict::NormalizingPower { n: 2 });
        let report = direction_report(&h, &w("ab"), bounds(50, 3)).unwrap();
        assert_eq!(report.verdict, Verdict::NoWitnessUpToBound);
    }

    #[test]
    fn normal_congruence_subgroup_normalizes_immediately() {
        let h = SubgroupHandle::Congruence(CongruenceOracle::principal(3, 2));
        let gamma = GroupElement::Matrix(
            RationalMatrix::elementary(3, 0, 1, Rational::from_integer(1.into()))
                .matmul(&RationalMatrix::elementary(
                    3,
                    2,
                    0,
                    Rational::from_integer(1.into()),
                ))
                .unwrap(),
        );
        let report = direction_report(&h, &gamma, ProbeBounds::default()).unwrap();
        assert_eq!(report.verdict, Verdict::NormalizingPower { n: 1 });
        assert!(replay(&h, &report).unwrap());
    }

    #[test]
    fn normal_subgroup_has_every_exponent_as_env_witness() {
        let h = SubgroupHandle::Congruence(CongruenceOracle::principal(3, 2));
        let gamma = GroupElement::Matrix(
            RationalMatrix::elementary(3, 0, 1, Rational::from_integer(1.into()))
                .matmul(&RationalMatrix::elementary(
                    3,
                    1,
                    2,
                    Rational::from_integer((-1).into()),
                ))
                .unwrap(),
        );
        let probe_set = vec![
            GroupElement::Matrix(RationalMatrix::elementary(
                3,
                1,
                0,
                Rational::from_integer(2.into()),
            )),
            GroupElement::Matrix(RationalMatrix::elementary(
                3,
                0,
                2,
                Rational::from_integer(4.into()),
            )),
        ];
        let report = env_witnesses(&h, &gamma, &probe_set, bounds(12, 3)).unwrap();
        match &report.verdict {
            Verdict::EnvWitnesses { witnesses } => {
                let all: Vec<u64> = (1..=12).collect();
                assert_eq!(witnesses, &all, "normality makes every exponent a witness");
            }
            other => panic!("unexpected verdict {other:?}"),
        }
        assert!(replay(&h, &report).unwrap());
    }

    #[test]
    fn borel_image_direction_normalizes_within_group_order() {
        // upper-triangular image mod 2 in SL_3: the direction's image
        // has order dividing |SL_3(Z/2)| = 168, so some power normalizes
        let gens = vec![
            ModMatrix::from_entries(3, 2, &[1, 1, 0, 0, 1, 0, 0, 0, 1]),
            ModMatrix::from_entries(3, 2, &[1, 0, 0, 0, 1, 1, 0, 0, 1]),
        ];
        let h = SubgroupHandle::Congruence(CongruenceOracle::new(3, 2, gens, 1 << 20).unwrap());
        let gamma = GroupElement::Matrix(
            RationalMatrix::elementary(3, 2, 0, Rational::from_integer(1.into()))
                .matmul(&RationalMatrix::elementary(
                    3,
                    0,
                    1,
                    Rational::from_integer(1.into()),
                ))
                .unwrap(),
        );
        let report = normalizer_power(&h, &gamma, bounds(168, 3)).unwrap();
        match report.verdict {
            Verdict::NormalizingPower { n } => assert!(n <= 168),
            other => panic!("expected a normalizing power, got {other:?}"),
        }
    }

    #[test]
    fn monotone_in_probe_set_and_bound() {
        let h = squares();
        let small = env_witnesses(&h, &w("a"), &[w("aa")], bounds(12, 3)).unwrap();
        let large = env_witnesses(&h, &w("a"), &[w("aa"), w("bb")], bounds(12, 3)).unwrap();
        let (Verdict::EnvWitnesses { witnesses: ws }, Verdict::EnvWitnesses { witnesses: wl }) =
            (&small.verdict, &large.verdict)
        else {
            panic!("expected witnesses");
        };
        // enlarging F can only shrink the witness set
        assert!(wl.iter().all(|n| ws.contains(n)));

        let longer = env_witnesses(&h, &w("a"), &[w("aa")], bounds(24, 3)).unwrap();
        let Verdict::EnvWitnesses { witnesses: wlong } = &longer.verdict else {
            panic!("expected witnesses");
        };
        // enlarging the bound can only grow it
        assert!(ws.iter().all(|n| wlong.contains(n)));
    }

    #[test]
    fn power_direction_consistency() {
        // if gamma normalizes at power n, probing gamma^n cannot do
        // worse than probing gamma
        let h = squares();
        let gamma = w("a");
        let report = normalizer_power(&h, &gamma, bounds(16, 3)).unwrap();
        let Verdict::NormalizingPower { n } = report.verdict else {
            panic!("expected normalizing power");
        };
        let power = w(&"a".repeat(n as usize));
        let direct = direction_report(&h, &gamma, bounds(16, 2)).unwrap();
        let via_power = direction_report(&h, &power, bounds(16, 2)).unwrap();
        assert!(direct.verdict.strength() >= via_power.verdict.strength());
    }

    #[test]
    fn report_json_round_trip() {
        let h = squares();
        let report = direction_report(&h, &w("a"), bounds(8, 2)).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: WitnessReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn tampered_certificates_fail_replay() {
        let h = squares();
        let mut report = env_witnesses(&h, &w("a"), &[w("aa"), w("bb")], bounds(6, 3)).unwrap();
        if let Some(cert) = report.certificates.first_mut() {
            cert.conjugate = "abab".into();
        }
        assert!(!replay(&h, &report).unwrap());
    }
}
