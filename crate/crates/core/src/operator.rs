//! Maps between pseudometric cones and the checks an honest isometry passes.
//!
//! An [`IsometryOracle`] wraps any [`ConeMap`] with a declared
//! [`ConeFamily`] and a query budget. Nothing about the map is trusted:
//! norm preservation, scalar preservation and `Pp` preservation are
//! properties the `check_*` functions test on probe sets.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::cone::unique_peak;
use crate::error::Error;
use crate::pseudometric::{same_space, Pseudometric};
use crate::rational::{self, Rational};
use crate::space::{Bijection, Space};

/// `d / λ` with `λ = max(1, 2·lip(d)/k)`, which lies strictly inside
/// `LPM_k`; other families leave `d` unchanged.
pub fn rescale_into(d: &Pseudometric, family: &ConeFamily) -> Pseudometric {
    let Some(k) = family.k() else {
        return d.clone();
    };
    let lip = d.lip_constant().unwrap_or_else(|_| rational::zero());
    let lambda = &lip * rational::int(2) / k;
    if lambda > rational::one() {
        d.scale(&lambda.recip())
    } else {
        d.clone()
    }
}

/// Which cone the oracle claims to act on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeFamily {
    /// All pseudometrics.
    Pm,
    /// Lipschitz pseudometrics; on a finite space this is every pseudometric.
    Lpm,
    /// Pseudometrics with `lip < k`.
    Lpmk(Rational),
}

impl ConeFamily {
    pub fn lpmk(k: Rational) -> Result<ConeFamily, Error> {
        if k.is_positive() {
            Ok(ConeFamily::Lpmk(k))
        } else {
            Err(Error::NotPositive {
                what: "k",
                value: k,
            })
        }
    }

    pub fn k(&self) -> Option<&Rational> {
        match self {
            ConeFamily::Lpmk(k) => Some(k),
            _ => None,
        }
    }

    pub fn contains(&self, d: &Pseudometric) -> bool {
        match self {
            ConeFamily::Pm | ConeFamily::Lpm => true,
            ConeFamily::Lpmk(k) => d.lip_constant().map_or(true, |lip| lip < *k),
        }
    }
}

impl fmt::Display for ConeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConeFamily::Pm => f.write_str("pm"),
            ConeFamily::Lpm => f.write_str("lpm"),
            ConeFamily::Lpmk(k) => write!(f, "lpmk:{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "T",
            Direction::Inverse => "T^-1",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{direction} query outside the declared cone: lip = {lip}, k = {k}")]
    NotInCone {
        direction: Direction,
        lip: Rational,
        k: Rational,
    },
    #[error("{direction} image leaves the declared cone: lip = {lip}, k = {k}")]
    FamilyMismatch {
        direction: Direction,
        lip: Rational,
        k: Rational,
    },
    #[error("query budget of {0} exhausted")]
    BudgetExhausted(usize),
    #[error("{direction} query on the wrong space")]
    WrongSpace { direction: Direction },
    #[error("{direction} image is not a pseudometric: {source}")]
    InvalidImage { direction: Direction, source: Error },
}

/// A map between the pseudometrics on two finite spaces, in both directions.
pub trait ConeMap: Send + Sync {
    fn domain(&self) -> &Arc<Space>;
    fn codomain(&self) -> &Arc<Space>;
    fn forward(&self, d: &Pseudometric) -> Result<Pseudometric, OracleError>;
    fn inverse(&self, rho: &Pseudometric) -> Result<Pseudometric, OracleError>;
    fn name(&self) -> String;
}

pub const DEFAULT_BUDGET: usize = 1_000_000;

/// A [`ConeMap`] queried through its declared cone, with a query budget.
pub struct IsometryOracle {
    map: Box<dyn ConeMap>,
    family: ConeFamily,
    budget: usize,
    used: usize,
}

impl fmt::Debug for IsometryOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IsometryOracle")
            .field("map", &self.map.name())
            .field("family", &self.family)
            .field("budget", &self.budget)
            .field("used", &self.used)
            .finish()
    }
}

impl IsometryOracle {
    pub fn new<M: ConeMap + 'static>(map: M, family: ConeFamily) -> IsometryOracle {
        IsometryOracle {
            map: Box::new(map),
            family,
            budget: DEFAULT_BUDGET,
            used: 0,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> IsometryOracle {
        self.budget = budget;
        self
    }

    pub fn family(&self) -> &ConeFamily {
        &self.family
    }

    pub fn domain(&self) -> &Arc<Space> {
        self.map.domain()
    }

    pub fn codomain(&self) -> &Arc<Space> {
        self.map.codomain()
    }

    pub fn name(&self) -> String {
        self.map.name()
    }

    pub fn queries_used(&self) -> usize {
        self.used
    }

    /// `T(d)` for `d` on the domain.
    pub fn forward(&mut self, d: &Pseudometric) -> Result<Pseudometric, OracleError> {
        self.query(Direction::Forward, d)
    }

    /// `T⁻¹(ρ)` for `ρ` on the codomain.
    pub fn inverse(&mut self, rho: &Pseudometric) -> Result<Pseudometric, OracleError> {
        self.query(Direction::Inverse, rho)
    }

    fn query(
        &mut self,
        direction: Direction,
        input: &Pseudometric,
    ) -> Result<Pseudometric, OracleError> {
        let (from, to) = match direction {
            Direction::Forward => (self.map.domain(), self.map.codomain()),
            Direction::Inverse => (self.map.codomain(), self.map.domain()),
        };
        if !same_space(input.space(), from) {
            return Err(OracleError::WrongSpace { direction });
        }
        if let ConeFamily::Lpmk(k) = &self.family {
            if !self.family.contains(input) {
                return Err(OracleError::NotInCone {
                    direction,
                    lip: input.lip_constant().unwrap_or_default(),
                    k: k.clone(),
                });
            }
        }
        if self.used >= self.budget {
            return Err(OracleError::BudgetExhausted(self.budget));
        }
        self.used += 1;
        let image = match direction {
            Direction::Forward => self.map.forward(input)?,
            Direction::Inverse => self.map.inverse(input)?,
        };
        if !same_space(image.space(), to) {
            return Err(OracleError::WrongSpace { direction });
        }
        if let ConeFamily::Lpmk(k) = &self.family {
            if !self.family.contains(&image) {
                return Err(OracleError::FamilyMismatch {
                    direction,
                    lip: image.lip_constant().unwrap_or_default(),
                    k: k.clone(),
                });
            }
        }
        Ok(image)
    }
}

/// The composition operator `S(d)(y, y') = d(φ(y), φ(y'))` for a bijection
/// `φ: Y → X`, mapping pseudometrics on `X` to pseudometrics on `Y`.
#[derive(Debug, Clone)]
pub struct CompositionOperator {
    phi: Bijection,
    domain: Arc<Space>,
    codomain: Arc<Space>,
}

impl CompositionOperator {
    /// `domain` is `X`, `codomain` is `Y`, `phi` maps `Y`'s points to `X`'s.
    pub fn new(phi: Bijection, domain: &Arc<Space>, codomain: &Arc<Space>) -> Result<Self, Error> {
        if domain.len() != codomain.len() || phi.len() != codomain.len() {
            return Err(Error::NotBijection(format!(
                "{} points map onto {} points",
                codomain.len(),
                domain.len()
            )));
        }
        Ok(CompositionOperator {
            phi,
            domain: Arc::clone(domain),
            codomain: Arc::clone(codomain),
        })
    }

    pub fn phi(&self) -> &Bijection {
        &self.phi
    }
}

impl ConeMap for CompositionOperator {
    fn domain(&self) -> &Arc<Space> {
        &self.domain
    }

    fn codomain(&self) -> &Arc<Space> {
        &self.codomain
    }

    fn forward(&self, d: &Pseudometric) -> Result<Pseudometric, OracleError> {
        Ok(d.pullback(&self.codomain, &self.phi))
    }

    fn inverse(&self, rho: &Pseudometric) -> Result<Pseudometric, OracleError> {
        Ok(rho.pullback(&self.domain, &self.phi.inverse()))
    }

    fn name(&self) -> String {
        "composition".into()
    }
}

/// The oracle of the composition operator along `phi: Y → X`.
///
/// For [`ConeFamily::Lpmk`] the operator only stays inside the cone when
/// `phi` does not stretch distances; images that leave it are reported as
/// [`OracleError::FamilyMismatch`] when queried.
pub fn compose(
    phi: Bijection,
    domain: &Arc<Space>,
    codomain: &Arc<Space>,
    family: ConeFamily,
) -> Result<IsometryOracle, Error> {
    Ok(IsometryOracle::new(
        CompositionOperator::new(phi, domain, codomain)?,
        family,
    ))
}

/// Ways to corrupt a composition operator, used as adversarial fixtures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Corruption {
    /// Adds `c` to every off-diagonal entry (and subtracts it on the way back).
    ConstantShift(Rational),
    /// Squares every entry in both directions.
    EntrywiseSquare,
    /// Rotates the target points by an amount that depends on the probe.
    ProbePermutation,
    /// Replaces the image by the constant pseudometric at level `‖d‖`.
    Flatten,
}

impl Corruption {
    pub fn name(&self) -> &'static str {
        match self {
            Corruption::ConstantShift(_) => "constant-shift",
            Corruption::EntrywiseSquare => "entrywise-squaring",
            Corruption::ProbePermutation => "probe-permutation",
            Corruption::Flatten => "flatten",
        }
    }
}

/// A composition operator with a [`Corruption`] applied on top.
#[derive(Debug, Clone)]
pub struct BrokenOperator {
    base: CompositionOperator,
    corruption: Corruption,
}

impl BrokenOperator {
    pub fn new(base: CompositionOperator, corruption: Corruption) -> BrokenOperator {
        BrokenOperator { base, corruption }
    }
}

/// A probe-derived rotation amount in `0..n`.
fn fingerprint(d: &Pseudometric, n: usize) -> usize {
    let mut acc = BigInt::zero();
    for i in 0..n {
        for j in i + 1..n {
            let v = d.get(i, j);
            acc += v.numer() + v.denom() * BigInt::from(i + 2 * j + 1);
        }
    }
    (acc % BigInt::from(n)).to_usize().unwrap_or(0)
}

fn rotate(n: usize, by: usize) -> Bijection {
    Bijection::new((0..n).map(|i| (i + by) % n).collect()).expect("rotation")
}

fn shifted(
    d: &Pseudometric,
    c: &Rational,
    direction: Direction,
) -> Result<Pseudometric, OracleError> {
    Pseudometric::from_fn(d.space(), |i, j| d.get(i, j) + c)
        .map_err(|source| OracleError::InvalidImage { direction, source })
}

fn squared(d: &Pseudometric, direction: Direction) -> Result<Pseudometric, OracleError> {
    Pseudometric::from_fn(d.space(), |i, j| d.get(i, j) * d.get(i, j))
        .map_err(|source| OracleError::InvalidImage { direction, source })
}

fn flattened(d: &Pseudometric) -> Pseudometric {
    Pseudometric::discrete(d.space()).scale(&d.sup_norm())
}

impl ConeMap for BrokenOperator {
    fn domain(&self) -> &Arc<Space> {
        self.base.domain()
    }

    fn codomain(&self) -> &Arc<Space> {
        self.base.codomain()
    }

    fn forward(&self, d: &Pseudometric) -> Result<Pseudometric, OracleError> {
        let dir = Direction::Forward;
        match &self.corruption {
            Corruption::ConstantShift(c) => shifted(&self.base.forward(d)?, c, dir),
            Corruption::EntrywiseSquare => squared(&self.base.forward(d)?, dir),
            Corruption::Flatten => Ok(flattened(&self.base.forward(d)?)),
            Corruption::ProbePermutation => {
                let n = d.len();
                let image = self.base.forward(d)?;
                let spin = rotate(n, fingerprint(d, n));
                Ok(image.pullback(self.base.codomain(), &spin))
            }
        }
    }

    fn inverse(&self, rho: &Pseudometric) -> Result<Pseudometric, OracleError> {
        let dir = Direction::Inverse;
        match &self.corruption {
            Corruption::ConstantShift(c) => self.base.inverse(&shifted(rho, &-c, dir)?),
            Corruption::EntrywiseSquare => squared(&self.base.inverse(rho)?, dir),
            Corruption::Flatten => Ok(flattened(&self.base.inverse(rho)?)),
            Corruption::ProbePermutation => {
                let n = rho.len();
                let spin = rotate(n, fingerprint(rho, n));
                let turned = rho.pullback(self.base.codomain(), &spin.inverse());
                self.base.inverse(&turned)
            }
        }
    }

    fn name(&self) -> String {
        self.corruption.name().into()
    }
}

/// A broken fixture over `phi: Y → X`.
pub fn broken(
    corruption: Corruption,
    phi: Bijection,
    domain: &Arc<Space>,
    codomain: &Arc<Space>,
    family: ConeFamily,
) -> Result<IsometryOracle, Error> {
    let base = CompositionOperator::new(phi, domain, codomain)?;
    Ok(IsometryOracle::new(
        BrokenOperator::new(base, corruption),
        family,
    ))
}

/// Probes for the two directions: pseudometrics on the domain for `T`, on
/// the codomain for `T⁻¹`.
#[derive(Debug, Clone, Default)]
pub struct Probes {
    pub forward: Vec<Pseudometric>,
    pub inverse: Vec<Pseudometric>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub direction: Direction,
    /// Index into the probe list; `None` for the zero round-trip.
    pub probe: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.probe {
            Some(i) => write!(f, "{} probe #{i}: {}", self.direction, self.detail),
            None => write!(f, "{}: {}", self.direction, self.detail),
        }
    }
}

/// Outcome of one check over a probe set.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub check: &'static str,
    pub queries: usize,
    pub violations: Vec<Violation>,
    /// Probes that did not meet the check's precondition.
    pub skipped: Vec<Violation>,
}

impl CheckReport {
    fn new(check: &'static str) -> CheckReport {
        CheckReport {
            check,
            queries: 0,
            violations: Vec::new(),
            skipped: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first_violation(&self) -> Option<&Violation> {
        self.violations.first()
    }

    fn fail(&mut self, direction: Direction, probe: Option<usize>, detail: impl Into<String>) {
        self.violations.push(Violation {
            direction,
            probe,
            detail: detail.into(),
        });
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "pass" } else { "FAIL" };
        write!(f, "{}: {verdict} ({} queries", self.check, self.queries)?;
        if !self.skipped.is_empty() {
            write!(f, ", {} skipped", self.skipped.len())?;
        }
        write!(f, ")")?;
        if let Some(v) = self.first_violation() {
            write!(f, "; first violation: {v}")?;
        }
        Ok(())
    }
}

fn query(
    oracle: &mut IsometryOracle,
    report: &mut CheckReport,
    direction: Direction,
    d: &Pseudometric,
) -> Result<Pseudometric, OracleError> {
    report.queries += 1;
    match direction {
        Direction::Forward => oracle.forward(d),
        Direction::Inverse => oracle.inverse(d),
    }
}

fn probe_lists(probes: &Probes) -> [(Direction, &[Pseudometric]); 2] {
    [
        (Direction::Forward, &probes.forward),
        (Direction::Inverse, &probes.inverse),
    ]
}

/// `‖T(d)‖ = ‖d‖` and `‖T⁻¹(ρ)‖ = ‖ρ‖` on every probe, and both
/// directions send zero to zero.
pub fn check_norm_preserving(oracle: &mut IsometryOracle, probes: &Probes) -> CheckReport {
    let mut report = CheckReport::new("norm-preserving");
    let zeros = [
        (Direction::Forward, Pseudometric::zero(oracle.domain())),
        (Direction::Inverse, Pseudometric::zero(oracle.codomain())),
    ];
    for (direction, zero) in zeros {
        match query(oracle, &mut report, direction, &zero) {
            Ok(image) if image.is_zero() => {}
            Ok(image) => report.fail(
                direction,
                None,
                format!("image of zero has norm {}", image.sup_norm()),
            ),
            Err(e) => report.fail(direction, None, e.to_string()),
        }
    }
    for (direction, list) in probe_lists(probes) {
        for (i, d) in list.iter().enumerate() {
            match query(oracle, &mut report, direction, d) {
                Ok(image) => {
                    let (before, after) = (d.sup_norm(), image.sup_norm());
                    if before != after {
                        report.fail(direction, Some(i), format!("norm {before} became {after}"));
                    }
                }
                Err(e) => report.fail(direction, Some(i), e.to_string()),
            }
        }
    }
    report
}

/// `T(t·d) = t·T(d)` and `T⁻¹(t·ρ) = t·T⁻¹(ρ)`, entrywise and exactly, for
/// each probe and each `t ∈ [0, 1]`.
pub fn check_scalar_preserving(
    oracle: &mut IsometryOracle,
    probes: &Probes,
    scalars: &[Rational],
) -> CheckReport {
    let mut report = CheckReport::new("scalar-preserving");
    for (direction, list) in probe_lists(probes) {
        for (i, d) in list.iter().enumerate() {
            let image = match query(oracle, &mut report, direction, d) {
                Ok(image) => image,
                Err(e) => {
                    report.fail(direction, Some(i), e.to_string());
                    continue;
                }
            };
            for t in scalars {
                if t.is_negative() || *t > rational::one() {
                    report.skipped.push(Violation {
                        direction,
                        probe: Some(i),
                        detail: format!("scalar {t} outside [0, 1]"),
                    });
                    continue;
                }
                match query(oracle, &mut report, direction, &d.scale(t)) {
                    Ok(scaled) if scaled == image.scale(t) => {}
                    Ok(_) => report.fail(
                        direction,
                        Some(i),
                        format!("image of {t}·d differs from {t}·image"),
                    ),
                    Err(e) => report.fail(direction, Some(i), format!("t = {t}: {e}")),
                }
            }
        }
    }
    report
}

/// Each probe with a unique peak must map to a pseudometric with a unique
/// peak. Probes without one are skipped and recorded.
pub fn check_pp_preserving(oracle: &mut IsometryOracle, probes: &Probes) -> CheckReport {
    let mut report = CheckReport::new("Pp-preserving");
    for (direction, list) in probe_lists(probes) {
        for (i, d) in list.iter().enumerate() {
            if unique_peak(d).is_none() {
                report.skipped.push(Violation {
                    direction,
                    probe: Some(i),
                    detail: "probe is not in Pp".into(),
                });
                continue;
            }
            match query(oracle, &mut report, direction, d) {
                Ok(image) if unique_peak(&image).is_some() => {}
                Ok(image) => {
                    let count = crate::cone::maximizer_doubletons(&image).map_or(0, |s| s.len());
                    report.fail(
                        direction,
                        Some(i),
                        format!("image has {count} maximizing doubletons"),
                    );
                }
                Err(e) => report.fail(direction, Some(i), e.to_string()),
            }
        }
    }
    report
}

/// `T⁻¹(T(d)) = d` and `T(T⁻¹(ρ)) = ρ` on every probe.
pub fn check_round_trip(oracle: &mut IsometryOracle, probes: &Probes) -> CheckReport {
    let mut report = CheckReport::new("round-trip");
    for (direction, list) in probe_lists(probes) {
        let back = match direction {
            Direction::Forward => Direction::Inverse,
            Direction::Inverse => Direction::Forward,
        };
        for (i, d) in list.iter().enumerate() {
            let there = match query(oracle, &mut report, direction, d) {
                Ok(v) => v,
                Err(e) => {
                    report.fail(direction, Some(i), e.to_string());
                    continue;
                }
            };
            match query(oracle, &mut report, back, &there) {
                Ok(again) if again == *d => {}
                Ok(_) => report.fail(direction, Some(i), "round trip does not return the probe"),
                Err(e) => report.fail(direction, Some(i), e.to_string()),
            }
        }
    }
    report
}
