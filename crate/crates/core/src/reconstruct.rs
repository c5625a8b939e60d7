//! Recovering the point bijection behind a cone isometry.
//!
//! Given an oracle `T` from pseudometrics on `X` to pseudometrics on `Y`:
//!
//! 1. For every doubleton `{y, y'}` of `Y`, feed `T⁻¹` several probes that
//!    peak exactly at `{y, y'}`. An honest isometry sends each to a
//!    pseudometric on `X` that peaks at one doubleton, the same one for every
//!    probe. That doubleton is `Φ({y, y'})`.
//! 2. For `|Y| ≥ 3`, `φ(y)` is the single point shared by all `Φ({y, z})`.
//! 3. `T(d) = d ∘ (φ × φ)` is then checked on independent probes, and the
//!    distortion of `φ` is read off the oracle's images of the base metrics.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cone::maximizer_doubletons;
use crate::error::Error;
use crate::operator::{
    check_norm_preserving, check_pp_preserving, check_scalar_preserving, rescale_into, CheckReport,
    ConeFamily, IsometryOracle, OracleError, Probes,
};
use crate::peaking::build_peaking;
use crate::pseudometric::{d_of_functions, Pseudometric};
use crate::random::random_pseudometric;
use crate::rational::{self, Rational};
use crate::space::{Bijection, Doubleton, Space};

pub const DEFAULT_PROBES_PER_PAIR: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReconstructError {
    #[error("at least {min} probes per pair are needed, got {found}")]
    TooFewProbes { min: usize, found: usize },
    #[error("no probe seeds given")]
    NoSeeds,
    #[error("probe #{probe} at pair {pair}: inverse image has {maximizers} maximizing doubletons")]
    NotPpPreserving {
        pair: Doubleton,
        probe: usize,
        maximizers: usize,
    },
    #[error("pair {pair}: probe #{} peaks at {} but probe #{} peaks at {}", first.0, first.1, second.0, second.1)]
    Inconsistent {
        pair: Doubleton,
        first: (usize, Doubleton),
        second: (usize, Doubleton),
    },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("spaces have {x} and {y} points")]
    SizeMismatch { x: usize, y: usize },
    #[error("no entry for pair {0}")]
    MissingPair(Doubleton),
    #[error("pairs {first} and {second} both map to {image}")]
    NotInjective {
        first: Doubleton,
        second: Doubleton,
        image: Doubleton,
    },
    #[error("images of {{{y}, {z1}}} and {{{y}, {z2}}} are disjoint")]
    EmptyIntersection {
        y: usize,
        z1: usize,
        z2: usize,
        /// 1 on the two disjoint images, 3 elsewhere.
        gadget: Pseudometric,
        certificate: String,
    },
    #[error("images of the pairs at {y} share {} points, not one", candidates.len())]
    NotSingleton { y: usize, candidates: Vec<usize> },
    #[error("points {first} and {second} both map to {image}")]
    NotBijective {
        first: usize,
        second: usize,
        image: usize,
    },
    #[error("pair {pair} maps to {table} but its points map to {pointwise}")]
    Incoherent {
        pair: Doubleton,
        table: Doubleton,
        pointwise: Doubleton,
    },
    #[error("{0}")]
    BoundViolated(String),
}

impl ReconstructError {
    /// The message with point labels in place of indices.
    pub fn explain(&self, x: &Space, y: &Space) -> String {
        match self {
            ReconstructError::NotPpPreserving {
                pair,
                probe,
                maximizers,
            } => format!(
                "probe #{probe} at pair {}: inverse image has {maximizers} maximizing doubletons",
                y.show(*pair)
            ),
            ReconstructError::Inconsistent {
                pair,
                first,
                second,
            } => format!(
                "pair {}: probe #{} peaks at {} but probe #{} peaks at {}",
                y.show(*pair),
                first.0,
                x.show(first.1),
                second.0,
                x.show(second.1)
            ),
            ReconstructError::MissingPair(pair) => format!("no entry for pair {}", y.show(*pair)),
            ReconstructError::NotInjective {
                first,
                second,
                image,
            } => format!(
                "pairs {} and {} both map to {}",
                y.show(*first),
                y.show(*second),
                x.show(*image)
            ),
            ReconstructError::EmptyIntersection {
                y: p,
                z1,
                z2,
                certificate,
                ..
            } => format!(
                "images of {{{p}, {a}}} and {{{p}, {b}}} are disjoint; {certificate}",
                p = y.label(*p),
                a = y.label(*z1),
                b = y.label(*z2)
            ),
            ReconstructError::NotSingleton { y: p, candidates } => format!(
                "images of the pairs at {} share {} points, not one",
                y.label(*p),
                candidates.len()
            ),
            ReconstructError::NotBijective {
                first,
                second,
                image,
            } => format!(
                "points {} and {} both map to {}",
                y.label(*first),
                y.label(*second),
                x.label(*image)
            ),
            ReconstructError::Incoherent {
                pair,
                table,
                pointwise,
            } => format!(
                "pair {} maps to {} but its points map to {}",
                y.show(*pair),
                x.show(*table),
                x.show(*pointwise)
            ),
            other => other.to_string(),
        }
    }
}

/// `Φ`, as recovered from the oracle, with the per-probe evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubletonMap {
    /// Doubletons of `Y` to doubletons of `X`.
    pub table: BTreeMap<Doubleton, Doubleton>,
    pub probes_used: usize,
    /// Peak of `T⁻¹` of each probe, per pair, in probe order.
    pub evidence: BTreeMap<Doubleton, Vec<Doubleton>>,
}

/// The `i`-th probe seed: `seeds[i mod s] + ⌊i / s⌋·δ_Y`, with `δ_Y` the
/// discrete pseudometric, so that any number of distinct seeds is available.
fn seed(seeds: &[Pseudometric], i: usize) -> Pseudometric {
    let s = seeds.len();
    let base = &seeds[i % s];
    let shift = rational::int((i / s) as i64);
    base.add(&Pseudometric::discrete(base.space()).scale(&shift))
        .expect("seeds live on one space")
}

/// The `i`-th probe at `pair`: a pseudometric on `Y` peaking only at `pair`,
/// rescaled into the oracle's cone.
pub fn pair_probe(
    seeds: &[Pseudometric],
    i: usize,
    pair: Doubleton,
    family: &ConeFamily,
) -> Pseudometric {
    let transcript = build_peaking(&seed(seeds, i), pair.first(), pair.second())
        .expect("doubletons have distinct points");
    rescale_into(&transcript.peaked(), family)
}

/// Recovers `Φ: D(Y) → D(X)` with `m` probes per doubleton of `Y`.
///
/// `seeds` are pseudometrics on `Y`; the default set is `{0, d_Y}`.
pub fn recover_doubleton_map(
    oracle: &mut IsometryOracle,
    seeds: &[Pseudometric],
    m: usize,
) -> Result<DoubletonMap, ReconstructError> {
    if m < 2 {
        return Err(ReconstructError::TooFewProbes { min: 2, found: m });
    }
    if seeds.is_empty() {
        return Err(ReconstructError::NoSeeds);
    }
    let y = Arc::clone(oracle.codomain());
    let family = oracle.family().clone();
    let mut table = BTreeMap::new();
    let mut evidence = BTreeMap::new();
    let mut probes_used = 0;
    for pair in y.doubletons() {
        let mut peaks: Vec<Doubleton> = Vec::with_capacity(m);
        for i in 0..m {
            let probe = pair_probe(seeds, i, pair, &family);
            probes_used += 1;
            let image = oracle.inverse(&probe)?;
            let maxima = maximizer_doubletons(&image).unwrap_or_default();
            if maxima.len() != 1 {
                return Err(ReconstructError::NotPpPreserving {
                    pair,
                    probe: i,
                    maximizers: maxima.len(),
                });
            }
            let peak = *maxima.iter().next().expect("one maximizer");
            if let Some(j) = peaks.iter().position(|p| *p != peak) {
                return Err(ReconstructError::Inconsistent {
                    pair,
                    first: (j, peaks[j]),
                    second: (i, peak),
                });
            }
            peaks.push(peak);
        }
        table.insert(pair, peaks[0]);
        evidence.insert(pair, peaks);
    }
    Ok(DoubletonMap {
        table,
        probes_used,
        evidence,
    })
}

/// The reconstructed `φ: Y → X` together with `Φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub phi: Bijection,
    pub phi_map: BTreeMap<Doubleton, Doubleton>,
    pub probes_used: usize,
    pub consistency: BTreeMap<Doubleton, Vec<Doubleton>>,
    /// Set for two-point spaces, where both bijections fit `Φ`.
    pub ambiguity: bool,
}

/// `1` on the doubletons `p` and `q` (disjoint), `3` on every other pair.
fn gadget(x: &Arc<Space>, p: Doubleton, q: Doubleton) -> Pseudometric {
    Pseudometric::from_fn(x, |a, b| match Doubleton::new(a, b) {
        None => rational::zero(),
        Some(pair) if pair == p || pair == q => rational::one(),
        Some(_) => rational::int(3),
    })
    .expect("disjoint unit pairs in a constant-3 space satisfy the triangle inequality")
}

/// Recovers `φ` from `Φ`.
///
/// For `|Y| ≥ 3`, `φ(y)` is the unique point common to all `Φ({y, z})`.
/// A pair of disjoint images `Φ({y, z₁})`, `Φ({y, z₂})` is reported with a
/// pseudometric `d` on `X` (1 on both images, 3 elsewhere): any `T` with
/// `T(d)(u, v) = d(Φ({u, v}))` would give `T(d)(z₁, z₂) = 3 > 1 + 1`.
pub fn recover_point_map(
    map: &DoubletonMap,
    x: &Arc<Space>,
    y: &Arc<Space>,
) -> Result<ReconstructionResult, ReconstructError> {
    let n = y.len();
    if x.len() != n {
        return Err(ReconstructError::SizeMismatch { x: x.len(), y: n });
    }
    let table = &map.table;
    let mut seen: BTreeMap<Doubleton, Doubleton> = BTreeMap::new();
    for pair in y.doubletons() {
        let image = *table
            .get(&pair)
            .ok_or(ReconstructError::MissingPair(pair))?;
        if image.second() >= n {
            return Err(ReconstructError::MissingPair(pair));
        }
        if let Some(first) = seen.insert(image, pair) {
            return Err(ReconstructError::NotInjective {
                first,
                second: pair,
                image,
            });
        }
    }
    let result = |phi: Bijection, ambiguity: bool| ReconstructionResult {
        phi,
        phi_map: table.clone(),
        probes_used: map.probes_used,
        consistency: map.evidence.clone(),
        ambiguity,
    };
    match n {
        0 | 1 => return Ok(result(Bijection::identity(n), false)),
        2 => return Ok(result(Bijection::identity(2), true)),
        _ => {}
    }

    let image = |a: usize, b: usize| table[&Doubleton::new(a, b).expect("distinct")];
    let mut forward = Vec::with_capacity(n);
    for p in 0..n {
        let others: Vec<usize> = (0..n).filter(|&z| z != p).collect();
        for (i, &z1) in others.iter().enumerate() {
            for &z2 in &others[i + 1..] {
                let (u, v) = (image(p, z1), image(p, z2));
                if u.intersection(v).is_empty() {
                    let g = gadget(x, u, v);
                    let w = image(z1, z2);
                    let certificate = format!(
                        "d = 1 on {} and {}, 3 elsewhere; d({}) = {}, so T(d) would give \
                         T(d)({}, {}) = {} > {} + {} = T(d)({}, {}) + T(d)({}, {})",
                        x.show(u),
                        x.show(v),
                        x.show(w),
                        g.get(w.first(), w.second()),
                        y.label(z1),
                        y.label(z2),
                        g.get(w.first(), w.second()),
                        g.get(u.first(), u.second()),
                        g.get(v.first(), v.second()),
                        y.label(p),
                        y.label(z1),
                        y.label(p),
                        y.label(z2),
                    );
                    return Err(ReconstructError::EmptyIntersection {
                        y: p,
                        z1,
                        z2,
                        gadget: g,
                        certificate,
                    });
                }
            }
        }
        let candidates: Vec<usize> = (0..n)
            .filter(|&a| others.iter().all(|&z| image(p, z).contains(a)))
            .collect();
        if candidates.len() != 1 {
            return Err(ReconstructError::NotSingleton { y: p, candidates });
        }
        forward.push(candidates[0]);
    }
    let mut preimage = vec![None; n];
    for (p, &a) in forward.iter().enumerate() {
        if let Some(first) = preimage[a] {
            return Err(ReconstructError::NotBijective {
                first,
                second: p,
                image: a,
            });
        }
        preimage[a] = Some(p);
    }
    let phi = Bijection::new(forward).expect("checked injective");
    for (&pair, &img) in table {
        let pointwise = phi.image(pair);
        if pointwise != img {
            return Err(ReconstructError::Incoherent {
                pair,
                table: img,
                pointwise,
            });
        }
    }
    Ok(result(phi, false))
}

/// One entry where `T(d)` and `d ∘ (φ × φ)` disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulaWitness {
    pub probe: usize,
    pub y1: usize,
    pub y2: usize,
    pub oracle_value: Rational,
    pub pullback_value: Rational,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FormulaReport {
    pub probes: usize,
    /// At most one per probe, preferring an entry where one side is zero.
    pub witnesses: Vec<FormulaWitness>,
    pub errors: Vec<(usize, OracleError)>,
}

impl FormulaReport {
    pub fn passed(&self) -> bool {
        self.witnesses.is_empty() && self.errors.is_empty()
    }
}

/// Checks `T(d)(y, y') = d(φ(y), φ(y'))` exactly on every probe on `X`.
pub fn verify_composition_formula(
    oracle: &mut IsometryOracle,
    phi: &Bijection,
    probes: &[Pseudometric],
) -> FormulaReport {
    let y = Arc::clone(oracle.codomain());
    let mut report = FormulaReport {
        probes: probes.len(),
        ..FormulaReport::default()
    };
    for (i, d) in probes.iter().enumerate() {
        let image = match oracle.forward(d) {
            Ok(image) => image,
            Err(e) => {
                report.errors.push((i, e));
                continue;
            }
        };
        let expected = d.pullback(&y, phi);
        let mut first: Option<FormulaWitness> = None;
        'scan: for y1 in 0..y.len() {
            for y2 in y1 + 1..y.len() {
                let (got, want) = (image.get(y1, y2), expected.get(y1, y2));
                if got == want {
                    continue;
                }
                let zero_vs_positive = rational::is_positive(got) != rational::is_positive(want);
                if first.is_none() || zero_vs_positive {
                    first = Some(FormulaWitness {
                        probe: i,
                        y1,
                        y2,
                        oracle_value: got.clone(),
                        pullback_value: want.clone(),
                    });
                }
                if zero_vs_positive {
                    break 'scan;
                }
            }
        }
        report.witnesses.extend(first);
    }
    report
}

/// The indicator pseudometric of the point `a` of `X`: `1` between `a` and
/// every other point, `0` elsewhere, rescaled into `family`.
///
/// For `|X| ≥ 3` and bijections `φ ≠ ψ` with `ψ(y) = a ≠ φ(y)`, the pullback
/// along `ψ` is `1` on `{y, z}` for every `z ≠ y`, while the pullback along
/// `φ` vanishes on such a pair whenever `φ(z) ≠ a`.
pub fn distinguishing_probe(x: &Arc<Space>, a: usize, family: &ConeFamily) -> Pseudometric {
    let indicator: Vec<Rational> = (0..x.len())
        .map(|p| {
            if p == a {
                rational::one()
            } else {
                rational::zero()
            }
        })
        .collect();
    let d = d_of_functions(x, &[indicator]).expect("one function");
    rescale_into(&d, family)
}

/// The indicator probes of every point of `X`. On `|X| ≥ 3` they separate
/// any two distinct bijections.
pub fn indicator_probes(x: &Arc<Space>, family: &ConeFamily) -> Vec<Pseudometric> {
    (0..x.len())
        .map(|a| distinguishing_probe(x, a, family))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    UniformHomeomorphism,
    BiLipschitz(Rational),
    Isometry,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::UniformHomeomorphism => f.write_str("uniform-homeomorphism"),
            Verdict::BiLipschitz(l) => write!(f, "bi-lipschitz({l})"),
            Verdict::Isometry => f.write_str("isometry"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationCertificate {
    pub verdict: Verdict,
    /// Distortion of `φ`; one for an isometry.
    pub lambda: Rational,
    /// Always true: a bijection of finite metric spaces is uniformly
    /// continuous in both directions.
    pub uniform_homeomorphism: bool,
    pub witnesses: Vec<String>,
}

fn lip_or_zero(d: &Pseudometric) -> Rational {
    d.lip_constant().unwrap_or_else(|_| rational::zero())
}

/// Verifies `(1/λ)·d_Y(y, y') ≤ d_X(φy, φy') ≤ λ·d_Y(y, y')` on every pair.
fn two_sided_bound(
    x: &Space,
    y: &Space,
    phi: &Bijection,
    lambda: &Rational,
    witnesses: &mut Vec<String>,
) -> Result<(), String> {
    for pair in y.doubletons() {
        let dy = y.dist(pair.first(), pair.second());
        let image = phi.image(pair);
        let dx = x.dist(image.first(), image.second());
        let lower = dy / lambda;
        let upper = dy * lambda;
        let line = format!(
            "{}: {lower} <= d_X{} = {dx} <= {upper}",
            y.show(pair),
            x.show(image)
        );
        if lower > *dx || *dx > upper {
            return Err(format!("bound fails at {line}"));
        }
        witnesses.push(line);
    }
    Ok(())
}

fn base_isometry(x: &Space, y: &Space, phi: &Bijection) -> bool {
    y.doubletons().into_iter().all(|pair| {
        let image = phi.image(pair);
        x.dist(image.first(), image.second()) == y.dist(pair.first(), pair.second())
    })
}

/// Classifies `φ` using the oracle's images of the base metrics.
///
/// For `PM` and `LPM`, `λ = max{lip T(d_X), lip T⁻¹(d_Y)}` and the two-sided
/// bound is checked on every pair. For `LPM_k`, the probes `k'·d_X` and
/// `k'·d_Y` with `k' ∈ {k/2, 3k/4, 7k/8}` certify
/// `k'·d_X(φz, φw) ≤ lip T(k'd_X)·d_Y(z, w) < k·d_Y(z, w)` (and the mirror
/// inequality), after which `d_X ∘ (φ × φ) = d_Y` is checked exactly.
pub fn classify(
    oracle: &mut IsometryOracle,
    result: &ReconstructionResult,
) -> Result<ClassificationCertificate, ReconstructError> {
    let x = Arc::clone(oracle.domain());
    let y = Arc::clone(oracle.codomain());
    let phi = &result.phi;
    let mut witnesses = Vec::new();
    if y.len() < 2 {
        return Ok(ClassificationCertificate {
            verdict: Verdict::Isometry,
            lambda: rational::one(),
            uniform_homeomorphism: true,
            witnesses: vec!["a one-point space has no pairs".into()],
        });
    }
    let lambda = match oracle.family().k().cloned() {
        None => {
            let fwd = lip_or_zero(&oracle.forward(&Pseudometric::base(&x))?);
            let inv = lip_or_zero(&oracle.inverse(&Pseudometric::base(&y))?);
            witnesses.push(format!("lip T(d_X) = {fwd}, lip T^-1(d_Y) = {inv}"));
            rational::max(&fwd, &inv).clone()
        }
        Some(k) => {
            let mut lambda = rational::zero();
            for (num, den) in [(1, 2), (3, 4), (7, 8)] {
                let kp = &k * rational::frac(num, den);
                lambda = k_prime_chain(oracle, phi, &k, &kp, &mut witnesses)?;
            }
            lambda
        }
    };
    if let Err(message) = two_sided_bound(&x, &y, phi, &lambda, &mut witnesses) {
        witnesses.push(message);
        return Ok(ClassificationCertificate {
            verdict: Verdict::UniformHomeomorphism,
            lambda,
            uniform_homeomorphism: true,
            witnesses,
        });
    }
    let verdict = if lambda == rational::one() && base_isometry(&x, &y, phi) {
        witnesses.push("d_X(phi y, phi y') = d_Y(y, y') on every pair".into());
        Verdict::Isometry
    } else {
        Verdict::BiLipschitz(lambda.clone())
    };
    Ok(ClassificationCertificate {
        verdict,
        lambda,
        uniform_homeomorphism: true,
        witnesses,
    })
}

/// One `k'` step in both directions; returns the distortion it measures.
fn k_prime_chain(
    oracle: &mut IsometryOracle,
    phi: &Bijection,
    k: &Rational,
    kp: &Rational,
    witnesses: &mut Vec<String>,
) -> Result<Rational, ReconstructError> {
    let x = Arc::clone(oracle.domain());
    let y = Arc::clone(oracle.codomain());
    let probe_x = Pseudometric::base(&x).scale(kp);
    let probe_y = Pseudometric::base(&y).scale(kp);
    assert!(kp < k, "k' must stay below k");
    let image_y = oracle.forward(&probe_x)?;
    let image_x = oracle.inverse(&probe_y)?;
    let lip_fwd = lip_or_zero(&image_y);
    let lip_inv = lip_or_zero(&image_x);
    if lip_fwd >= *k || lip_inv >= *k {
        return Err(ReconstructError::BoundViolated(format!(
            "k' = {kp}: lip T(k'd_X) = {lip_fwd}, lip T^-1(k'd_Y) = {lip_inv}, k = {k}"
        )));
    }
    witnesses.push(format!(
        "k' = {kp}: lip T(k'd_X) = {lip_fwd} < {k}, lip T^-1(k'd_Y) = {lip_inv} < {k}"
    ));
    let inv = phi.inverse();
    let chains = [
        (&y, &x, phi, &image_y, &lip_fwd, "T(k'd_X)"),
        (&x, &y, &inv, &image_x, &lip_inv, "T^-1(k'd_Y)"),
    ];
    for (here, there, map, image, lip, name) in chains {
        for pair in here.doubletons() {
            let target = map.image(pair);
            let lhs = kp * there.dist(target.first(), target.second());
            let value = image.get(pair.first(), pair.second());
            let dist = here.dist(pair.first(), pair.second());
            let mid = lip * dist;
            let rhs = k * dist;
            if lhs != *value || lhs > mid || mid >= rhs {
                return Err(ReconstructError::BoundViolated(format!(
                    "k' = {kp}, {name} at {}: {lhs} = {value} <= {mid} < {rhs} fails",
                    here.show(pair)
                )));
            }
        }
    }
    Ok(rational::max(&lip_fwd, &lip_inv).clone() / kp)
}

/// Settings for [`run_pipeline`].
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub probes_per_pair: usize,
    /// Random probes per direction for the checks and the formula.
    pub random_probes: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            probes_per_pair: DEFAULT_PROBES_PER_PAIR,
            random_probes: 10,
            seed: 0,
        }
    }
}

/// Everything the full pipeline found.
#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub checks: Vec<CheckReport>,
    pub doubleton_map: Result<DoubletonMap, ReconstructError>,
    pub reconstruction: Option<Result<ReconstructionResult, ReconstructError>>,
    pub formula: Option<FormulaReport>,
    pub certificate: Option<Result<ClassificationCertificate, ReconstructError>>,
    pub queries: usize,
}

impl PipelineReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
            && self.doubleton_map.is_ok()
            && matches!(self.reconstruction, Some(Ok(_)))
            && self.formula.as_ref().is_some_and(FormulaReport::passed)
            && matches!(self.certificate, Some(Ok(_)))
    }

    pub fn result(&self) -> Option<&ReconstructionResult> {
        self.reconstruction.as_ref()?.as_ref().ok()
    }
}

/// `count` random probes on `space`, rescaled into `family`.
pub fn random_probes(
    rng: &mut ChaCha8Rng,
    space: &Arc<Space>,
    count: usize,
    family: &ConeFamily,
) -> Vec<Pseudometric> {
    (0..count)
        .map(|_| rescale_into(&random_pseudometric(rng, space, 16), family))
        .collect()
}

/// Runs the preservation checks, recovers `Φ` and `φ`, verifies the
/// composition formula on random and indicator probes, and classifies.
pub fn run_pipeline(oracle: &mut IsometryOracle, config: &PipelineConfig) -> PipelineReport {
    let x = Arc::clone(oracle.domain());
    let y = Arc::clone(oracle.codomain());
    let family = oracle.family().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut verification = random_probes(&mut rng, &x, config.random_probes, &family);
    verification.extend(indicator_probes(&x, &family));
    let mut inverse = random_probes(&mut rng, &y, config.random_probes, &family);
    let seeds = vec![Pseudometric::zero(&y), Pseudometric::base(&y)];
    if let Some(pair) = y.doubletons().first() {
        inverse.push(pair_probe(&seeds, 0, *pair, &family));
    }
    let probes = Probes {
        forward: verification.clone(),
        inverse,
    };
    let scalars = [
        rational::zero(),
        rational::frac(1, 3),
        rational::frac(1, 2),
        rational::one(),
    ];
    let checks = vec![
        check_norm_preserving(oracle, &probes),
        check_scalar_preserving(oracle, &probes, &scalars),
        check_pp_preserving(oracle, &probes),
    ];

    let doubleton_map = recover_doubleton_map(oracle, &seeds, config.probes_per_pair);
    let mut report = PipelineReport {
        checks,
        doubleton_map,
        reconstruction: None,
        formula: None,
        certificate: None,
        queries: 0,
    };
    if let Ok(map) = &report.doubleton_map {
        let reconstruction = recover_point_map(map, &x, &y);
        if let Ok(result) = &reconstruction {
            report.formula = Some(verify_composition_formula(
                oracle,
                &result.phi,
                &verification,
            ));
            report.certificate = Some(classify(oracle, result));
        }
        report.reconstruction = Some(reconstruction);
    }
    report.queries = oracle.queries_used();
    report
}
