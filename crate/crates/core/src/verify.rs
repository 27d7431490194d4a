//! Residual suites over seeded random data.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bondi::{random_data, BondiData};
use crate::charges::{
    angular_momentum_with, center_of_mass, solve_embedding, FRAME_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::limits::{j1_fields, lemma_residuals, limits};
use crate::sphere::SphereGrid;
use crate::tensor::{interchange_residuals, magical_identity_residual};

/// Amplitude of the random corpus.
pub const CORPUS_AMPLITUDE: f64 = 0.3;
/// Bound on the absolute residuals of the embedding equations and on `u`-dependence.
pub const EXACT_TOLERANCE: f64 = 1e-10;
/// Cut parameter compared against `u = 0` in the limits suite.
pub const SHIFTED_U: f64 = 7.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Identities,
    Lemmas,
    Limits,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Lemmas => "lemmas",
            Suite::Limits => "limits",
        }
    }

    /// Default threshold for the suite's relative residuals.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::Identities | Suite::Lemmas => 1e-9,
            Suite::Limits => 1e-8,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identities" => Ok(Suite::Identities),
            "lemmas" => Ok(Suite::Lemmas),
            "limits" => Ok(Suite::Limits),
            other => Err(Error::InvalidArgument(format!(
                "unknown suite `{other}` (expected identities, lemmas or limits)"
            ))),
        }
    }
}

/// One residual against its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(value: f64, threshold: f64) -> Self {
        Self {
            value,
            threshold,
            passed: value <= threshold,
        }
    }
}

pub type Checks = BTreeMap<String, Check>;

fn key(seed: u64, name: &str) -> String {
    format!("seed{seed:03}.{name}")
}

/// `|a - b|` over the larger magnitude, both measured in the max norm.
pub fn relative_difference(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let abs = (0..3).fold(0.0f64, |m, k| m.max((a[k] - b[k]).abs()));
    let scale = (0..3).fold(0.0f64, |m, k| m.max(a[k].abs()).max(b[k].abs()));
    if scale > 0.0 {
        abs / scale
    } else {
        abs
    }
}

fn max_difference(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).fold(0.0f64, |m, k| m.max((a[k] - b[k]).abs()))
}

/// Seed corpus: seeds `1..=count`.
pub fn corpus(count: u64, band_limit: usize, com_frame: bool) -> impl Iterator<Item = (u64, BondiData)> {
    (1..=count).map(move |s| (s, random_data(s, band_limit, CORPUS_AMPLITUDE, com_frame)))
}

pub fn identity_checks(seed: u64, d: &BondiData, grid: &SphereGrid, tol: f64, out: &mut Checks) -> Result<()> {
    let r = interchange_residuals(d.shear(), grid)?;
    for (name, res) in r.named() {
        out.insert(key(seed, name), Check::new(res.relative(), tol));
    }
    let m = magical_identity_residual(d.shear(), grid)?;
    out.insert(key(seed, "magical_identity"), Check::new(m.relative(), tol));
    Ok(())
}

pub fn lemma_checks(seed: u64, d: &BondiData, grid: &SphereGrid, tol: f64, out: &mut Checks) -> Result<()> {
    let emb = solve_embedding(d, grid, FRAME_TOLERANCE)?;
    for (name, res) in lemma_residuals(d, &emb, grid)? {
        out.insert(key(seed, name), Check::new(res.relative(), tol));
    }
    Ok(())
}

pub fn limit_checks(seed: u64, d: &BondiData, grid: &SphereGrid, tol: f64, out: &mut Checks) -> Result<()> {
    let emb = solve_embedding(d, grid, FRAME_TOLERANCE)?;
    let (com_lim, j_lim) = limits(d, &emb, grid)?;
    let com = center_of_mass(d, grid, FRAME_TOLERANCE)?;
    let j = angular_momentum_with(d, &emb, grid)?;
    out.insert(
        key(seed, "com_equivalence"),
        Check::new(relative_difference(&com_lim, &com), tol),
    );
    out.insert(
        key(seed, "angmom_equivalence"),
        Check::new(relative_difference(&j_lim, &j), tol),
    );

    let shifted = d.with_u(SHIFTED_U)?;
    let emb_s = solve_embedding(&shifted, grid, FRAME_TOLERANCE)?;
    let (com_s, j_s) = limits(&shifted, &emb_s, grid)?;
    let du = max_difference(&com_s, &com_lim).max(max_difference(&j_s, &j_lim));
    out.insert(key(seed, "u_independence"), Check::new(du, EXACT_TOLERANCE));

    let (j1, j1_unsub) = j1_fields(d, &emb);
    out.insert(
        key(seed, "j1_divergence"),
        Check::new(j1_unsub.divergence().max_abs_coeff(), EXACT_TOLERANCE),
    );
    let diff = j1.sub(&j1_unsub);
    out.insert(
        key(seed, "j1_forms"),
        Check::new(
            diff.grad_potential()
                .max_abs_coeff()
                .max(diff.curl_potential().max_abs_coeff()),
            EXACT_TOLERANCE,
        ),
    );
    out.insert(
        key(seed, "first_order"),
        Check::new(emb.first_order_residual, EXACT_TOLERANCE),
    );
    Ok(())
}

/// Run one suite over `seeds` random cuts at band limit `band_limit`.
pub fn run_suite(suite: Suite, seeds: u64, band_limit: usize, tol: f64) -> Result<Checks> {
    let grid = SphereGrid::new(band_limit);
    let mut out = Checks::new();
    let com_frame = suite != Suite::Identities;
    for (seed, d) in corpus(seeds, band_limit, com_frame) {
        match suite {
            Suite::Identities => identity_checks(seed, &d, &grid, tol, &mut out)?,
            Suite::Lemmas => lemma_checks(seed, &d, &grid, tol, &mut out)?,
            Suite::Limits => limit_checks(seed, &d, &grid, tol, &mut out)?,
        }
    }
    Ok(out)
}

pub fn all_passed(checks: &Checks) -> bool {
    checks.values().all(|c| c.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_small_corpus() {
        for suite in [Suite::Identities, Suite::Lemmas, Suite::Limits] {
            let c = run_suite(suite, 2, 8, suite.default_tolerance()).unwrap();
            let failed: Vec<_> = c.iter().filter(|(_, c)| !c.passed).collect();
            assert!(failed.is_empty(), "{suite}: {failed:?}");
        }
    }

    #[test]
    fn zero_threshold_fails() {
        let c = run_suite(Suite::Lemmas, 1, 8, 0.0).unwrap();
        assert!(!all_passed(&c));
    }

    #[test]
    fn suite_names_parse() {
        for s in [Suite::Identities, Suite::Lemmas, Suite::Limits] {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("other".parse::<Suite>().is_err());
    }
}
