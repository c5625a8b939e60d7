//! Seeded randomized checks of peaking, extension and reconstruction.
//!
//! Trial `t` draws from a ChaCha8 stream selected by `t` under the run seed,
//! so any single trial can be replayed and the report is identical for
//! identical settings.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::unique_peak;
use crate::extend::{extend_lip_preserving, extend_untruncated, PartialPseudometric};
use crate::operator::{compose, ConeFamily};
use crate::peaking::{build_peaking, verify_peak_property};
use crate::pseudometric::Pseudometric;
use crate::random::{
    isometric_copy, random_bijection, random_pair, random_pseudometric, random_space, random_subset,
};
use crate::rational;
use crate::reconstruct::{run_pipeline, PipelineConfig, Verdict};
use crate::space::{Doubleton, Space};

pub const MAX_DENOMINATOR: i64 = 16;

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub trials: usize,
    pub max_points: usize,
    pub seed: u64,
    pub family: ConeFamily,
    /// Use the untruncated extension, which is not norm preserving.
    pub break_extension: bool,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            trials: 100,
            max_points: 8,
            seed: 0,
            family: ConeFamily::Pm,
            break_extension: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SuiteTally {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub suite: &'static str,
    pub trial: usize,
    pub transcript: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FuzzReport {
    pub peaking: SuiteTally,
    pub extension: SuiteTally,
    pub reconstruction: SuiteTally,
    pub first_failure: Option<Failure>,
}

impl FuzzReport {
    pub fn failures(&self) -> usize {
        self.peaking.failed + self.extension.failed + self.reconstruction.failed
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn render(&self, config: &FuzzConfig) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "fuzz: {} trials, max {} points, seed {}, family {}{}",
            config.trials,
            config.max_points,
            config.seed,
            config.family,
            if config.break_extension {
                ", extension broken"
            } else {
                ""
            }
        );
        for (name, t) in [
            ("peaking", &self.peaking),
            ("extension", &self.extension),
            ("reconstruction", &self.reconstruction),
        ] {
            let _ = writeln!(
                out,
                "  {name:<15} {} passed, {} failed, {} skipped",
                t.passed, t.failed, t.skipped
            );
        }
        match &self.first_failure {
            None => out.push_str("all checks passed\n"),
            Some(f) => {
                let _ = writeln!(
                    out,
                    "{} failures; first: {} trial {}",
                    self.failures(),
                    f.suite,
                    f.trial
                );
                for line in f.transcript.lines() {
                    let _ = writeln!(out, "  {line}");
                }
            }
        }
        out
    }
}

pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn show_matrix(d: &Pseudometric) -> String {
    d.rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(rational::format)
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn show_space(z: &Arc<Space>) -> String {
    show_matrix(&Pseudometric::base(z))
}

/// All peaking postconditions for `d` at `(x, y)`.
pub fn peaking_trial(d: &Pseudometric, x: usize, y: usize) -> Result<(), String> {
    let t = build_peaking(d, x, y).map_err(|e| e.to_string())?;
    if let Err(v) = verify_peak_property(d, &t.rho, x, y) {
        return Err(format!(
            "peak property fails at ({}, {}): {:?}",
            v.z, v.w, v.failure
        ));
    }
    let top = rational::int(4) * &t.b + rational::one();
    if *t.rho.get(x, y) != top || t.rho.sup_norm() != top {
        return Err(format!(
            "rho(x, y) = {}, |rho| = {}, 4b + 1 = {top}",
            t.rho.get(x, y),
            t.rho.sup_norm()
        ));
    }
    let peaked = t.peaked();
    if peaked.sup_norm() != d.get(x, y) + &top {
        return Err(format!("|d + rho| = {}", peaked.sup_norm()));
    }
    if unique_peak(&peaked) != Doubleton::new(x, y) {
        return Err("d + rho does not peak only at {x, y}".into());
    }
    let lip = t.rho.lip_constant().map_err(|e| e.to_string())?;
    if lip > t.lip_bound() {
        return Err(format!("lip(rho) = {lip} exceeds bound {}", t.lip_bound()));
    }
    Ok(())
}

/// Restriction, norm and Lipschitz equalities for an extension of `pd`.
pub fn extension_trial(pd: &PartialPseudometric, ext: &Pseudometric) -> Result<(), String> {
    let subset = pd.subset();
    for (i, &a) in subset.iter().enumerate() {
        for (j, &b) in subset.iter().enumerate() {
            if ext.get(a, b) != pd.get(i, j) {
                return Err(format!("restriction differs at ({a}, {b})"));
            }
        }
    }
    if ext.sup_norm() != pd.sup_norm() {
        return Err(format!("norm {} became {}", pd.sup_norm(), ext.sup_norm()));
    }
    let lip = ext.lip_constant().unwrap_or_else(|_| rational::zero());
    if lip != pd.lip_constant() {
        return Err(format!("lip {} became {lip}", pd.lip_constant()));
    }
    Pseudometric::new(ext.space(), ext.rows()).map_err(|e| format!("not a pseudometric: {e}"))?;
    Ok(())
}

fn run_peaking(rng: &mut ChaCha8Rng, max_points: usize) -> Option<Result<(), String>> {
    if max_points < 2 {
        return None;
    }
    let n = rng.gen_range(2..=max_points);
    let z = random_space(rng, "z", n, MAX_DENOMINATOR);
    let d = random_pseudometric(rng, &z, MAX_DENOMINATOR);
    let (x, y) = random_pair(rng, n);
    Some(peaking_trial(&d, x, y).map_err(|e| {
        format!(
            "d_Z = [{}]\nd = [{}]\npair = ({x}, {y})\n{e}",
            show_space(&z),
            show_matrix(&d)
        )
    }))
}

fn run_extension(
    rng: &mut ChaCha8Rng,
    max_points: usize,
    broken: bool,
) -> Option<Result<(), String>> {
    if max_points < 1 {
        return None;
    }
    let n = rng.gen_range(1..=max_points);
    let z = random_space(rng, "z", n, MAX_DENOMINATOR);
    let d = random_pseudometric(rng, &z, MAX_DENOMINATOR);
    let subset = random_subset(rng, n);
    let pd = PartialPseudometric::restrict(&d, &subset).expect("restriction of a pseudometric");
    let ext = if broken {
        extend_untruncated(&pd)
    } else {
        extend_lip_preserving(&pd)
    };
    Some(extension_trial(&pd, &ext).map_err(|e| {
        format!(
            "d_Z = [{}]\nd = [{}]\nsubset = {subset:?}\n{e}",
            show_space(&z),
            show_matrix(&d)
        )
    }))
}

fn run_reconstruction(
    rng: &mut ChaCha8Rng,
    max_points: usize,
    family: &ConeFamily,
) -> Option<Result<(), String>> {
    let top = max_points.min(7);
    if top < 3 {
        return None;
    }
    let n = rng.gen_range(3..=top);
    let x = random_space(rng, "x", n, MAX_DENOMINATOR);
    let phi = random_bijection(rng, n);
    let y = match family {
        ConeFamily::Lpmk(_) => isometric_copy(&x, "y", &phi),
        _ => random_space(rng, "y", n, MAX_DENOMINATOR),
    };
    let config = PipelineConfig {
        seed: rng.gen(),
        ..PipelineConfig::default()
    };
    let mut oracle = compose(phi.clone(), &x, &y, family.clone()).expect("equal sizes");
    let report = run_pipeline(&mut oracle, &config);
    let describe = |e: String| {
        format!(
            "d_X = [{}]\nd_Y = [{}]\nphi = {:?}\n{e}",
            show_space(&x),
            show_space(&y),
            phi.as_slice()
        )
    };
    if !report.passed() {
        return Some(Err(describe(format!("pipeline failed: {report:?}"))));
    }
    let result = report.result().expect("passed");
    if result.phi != phi {
        return Some(Err(describe(format!(
            "recovered {:?}",
            result.phi.as_slice()
        ))));
    }
    if matches!(family, ConeFamily::Lpmk(_)) {
        let verdict = &report
            .certificate
            .as_ref()
            .expect("passed")
            .as_ref()
            .expect("passed")
            .verdict;
        if *verdict != Verdict::Isometry {
            return Some(Err(describe(format!("verdict {verdict}"))));
        }
    }
    Some(Ok(()))
}

fn record(
    tally: &mut SuiteTally,
    first: &mut Option<Failure>,
    suite: &'static str,
    trial: usize,
    outcome: Option<Result<(), String>>,
) {
    match outcome {
        None => tally.skipped += 1,
        Some(Ok(())) => tally.passed += 1,
        Some(Err(transcript)) => {
            tally.failed += 1;
            if first.is_none() {
                *first = Some(Failure {
                    suite,
                    trial,
                    transcript,
                });
            }
        }
    }
}

pub fn run_fuzz(config: &FuzzConfig) -> FuzzReport {
    let mut report = FuzzReport::default();
    for trial in 0..config.trials {
        let mut rng = trial_rng(config.seed, trial);
        let outcome = run_peaking(&mut rng, config.max_points);
        record(
            &mut report.peaking,
            &mut report.first_failure,
            "peaking",
            trial,
            outcome,
        );
        let outcome = run_extension(&mut rng, config.max_points, config.break_extension);
        record(
            &mut report.extension,
            &mut report.first_failure,
            "extension",
            trial,
            outcome,
        );
        let outcome = run_reconstruction(&mut rng, config.max_points, &config.family);
        record(
            &mut report.reconstruction,
            &mut report.first_failure,
            "reconstruction",
            trial,
            outcome,
        );
    }
    report
}

/// Parses `pm`, `lpm` or `lpmk:k`.
pub fn parse_family(text: &str) -> Result<ConeFamily, String> {
    match text {
        "pm" => Ok(ConeFamily::Pm),
        "lpm" => Ok(ConeFamily::Lpm),
        _ => {
            let k = text
                .strip_prefix("lpmk:")
                .and_then(rational::parse)
                .ok_or_else(|| format!("unknown family `{text}`; expected pm, lpm or lpmk:k"))?;
            ConeFamily::lpmk(k).map_err(|e| e.to_string())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_repeats() {
        let config = FuzzConfig {
            trials: 20,
            max_points: 5,
            seed: 9,
            ..FuzzConfig::default()
        };
        let a = run_fuzz(&config);
        assert!(a.passed(), "{}", a.render(&config));
        assert_eq!(a, run_fuzz(&config));
    }

    #[test]
    fn zero_trials_pass() {
        let config = FuzzConfig {
            trials: 0,
            ..FuzzConfig::default()
        };
        assert!(run_fuzz(&config).passed());
    }

    #[test]
    fn broken_extension_is_caught() {
        let config = FuzzConfig {
            trials: 40,
            max_points: 6,
            seed: 1,
            break_extension: true,
            ..FuzzConfig::default()
        };
        let report = run_fuzz(&config);
        assert!(report.extension.failed > 0);
        assert_eq!(report.first_failure.unwrap().suite, "extension");
    }

    #[test]
    fn families_parse() {
        assert_eq!(parse_family("pm").unwrap(), ConeFamily::Pm);
        assert_eq!(
            parse_family("lpmk:3/2").unwrap(),
            ConeFamily::Lpmk(rational::frac(3, 2))
        );
        assert!(parse_family("lpmk:0").is_err());
        assert!(parse_family("cone").is_err());
    }
}
