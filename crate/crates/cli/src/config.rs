//! Experiment configuration: a TOML document with the sections
//! `[geometry]`, `[run]`, `[output]`, `[analysis]` and `[oracle]`.
//! Every key is optional; omitted keys take the defaults below.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qwalk_core::spline::Smoothing;
use qwalk_core::{derive_seed, Geometry};

use crate::error::{CliError, Result};

pub const DEFAULT_DISORDER: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];
pub const DEFAULT_FINITE_SITES: usize = 61;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lattice {
    Line,
    Ring,
    Segment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Occupation,
    P0,
    Fidelity,
    Mixing,
    Msd,
    Sigma,
    Ee,
    Negativity,
}

impl Observable {
    pub const ALL: [Observable; 8] = [
        Observable::Occupation,
        Observable::P0,
        Observable::Fidelity,
        Observable::Mixing,
        Observable::Msd,
        Observable::Sigma,
        Observable::Ee,
        Observable::Negativity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Occupation => "occupation",
            Observable::P0 => "p0",
            Observable::Fidelity => "fidelity",
            Observable::Mixing => "mixing",
            Observable::Msd => "msd",
            Observable::Sigma => "sigma",
            Observable::Ee => "ee",
            Observable::Negativity => "negativity",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// `"gcv"` or a positive penalty weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SmoothingSetting {
    Named(SmoothingName),
    Weight(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmoothingName {
    Gcv,
}

impl SmoothingSetting {
    pub fn parse(text: &str) -> Option<Self> {
        if text.eq_ignore_ascii_case("gcv") {
            return Some(SmoothingSetting::Named(SmoothingName::Gcv));
        }
        text.parse().ok().map(SmoothingSetting::Weight)
    }

    pub fn to_smoothing(self) -> Smoothing {
        match self {
            SmoothingSetting::Named(SmoothingName::Gcv) => Smoothing::Gcv,
            SmoothingSetting::Weight(w) => Smoothing::Fixed(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    pub kind: Lattice,
    /// Ring and segment default to 61; the line defaults to `2 steps + 1`.
    pub sites: Option<usize>,
}

impl Default for GeometrySection {
    fn default() -> Self {
        GeometrySection {
            kind: Lattice::Line,
            sites: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub steps: usize,
    pub realizations: usize,
    pub master_seed: u64,
    pub disorder: Vec<f64>,
    /// Times for occupation and negativity rows; defaults to `[steps]`.
    pub snapshot_times: Option<Vec<usize>>,
    pub observables: Vec<Observable>,
    /// Scalar observables are recorded at multiples of this stride and at
    /// the final step.
    pub scalar_stride: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            steps: 100,
            realizations: 1000,
            master_seed: 12345,
            disorder: DEFAULT_DISORDER.to_vec(),
            snapshot_times: None,
            observables: Observable::ALL.to_vec(),
            scalar_stride: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub format: Format,
    /// Standard output when absent.
    pub path: Option<PathBuf>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            format: Format::Csv,
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub smoothing: SmoothingSetting,
    /// Growth exponents are reported from this time on.
    pub sigma_min_time: usize,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            smoothing: SmoothingSetting::Named(SmoothingName::Gcv),
            sigma_min_time: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSection {
    pub times: Vec<usize>,
    /// Per-time default `16 (t + 1)`.
    pub quad_points: Option<usize>,
}

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection {
            times: vec![20, 40, 100],
            quad_points: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometry: GeometrySection,
    pub run: RunSection,
    pub output: OutputSection,
    pub analysis: AnalysisSection,
    pub oracle: OracleSection,
}

/// Command-line values that replace config-file keys when present.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub lattice: Option<Lattice>,
    pub sites: Option<usize>,
    pub steps: Option<usize>,
    pub realizations: Option<usize>,
    pub master_seed: Option<u64>,
    pub disorder: Option<Vec<f64>>,
    pub snapshot_times: Option<Vec<usize>>,
    pub observables: Option<Vec<Observable>>,
    pub scalar_stride: Option<usize>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub smoothing: Option<SmoothingSetting>,
    pub oracle_times: Option<Vec<usize>>,
    pub quad_points: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_str(&text)
            .map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message())))
    }

    pub fn apply(&mut self, o: Overrides) {
        let Overrides {
            lattice,
            sites,
            steps,
            realizations,
            master_seed,
            disorder,
            snapshot_times,
            observables,
            scalar_stride,
            format,
            output,
            smoothing,
            oracle_times,
            quad_points,
        } = o;
        if let Some(v) = lattice {
            self.geometry.kind = v;
        }
        if sites.is_some() {
            self.geometry.sites = sites;
        }
        if let Some(v) = steps {
            self.run.steps = v;
        }
        if let Some(v) = realizations {
            self.run.realizations = v;
        }
        if let Some(v) = master_seed {
            self.run.master_seed = v;
        }
        if let Some(v) = disorder {
            self.run.disorder = v;
        }
        if snapshot_times.is_some() {
            self.run.snapshot_times = snapshot_times;
        }
        if let Some(v) = observables {
            self.run.observables = v;
        }
        if let Some(v) = scalar_stride {
            self.run.scalar_stride = v;
        }
        if let Some(v) = format {
            self.output.format = v;
        }
        if output.is_some() {
            self.output.path = output;
        }
        if let Some(v) = smoothing {
            self.analysis.smoothing = v;
        }
        if let Some(v) = oracle_times {
            self.oracle.times = v;
        }
        if quad_points.is_some() {
            self.oracle.quad_points = quad_points;
        }
    }

    pub fn sites(&self) -> usize {
        match (self.geometry.kind, self.geometry.sites) {
            (_, Some(l)) => l,
            (Lattice::Line, None) => 2 * self.run.steps + 1,
            (_, None) => DEFAULT_FINITE_SITES,
        }
    }

    /// The lattice; only meaningful on a validated config.
    pub fn lattice(&self) -> Result<Geometry> {
        let kind = match self.geometry.kind {
            Lattice::Line => qwalk_core::GeometryKind::Line,
            Lattice::Ring => qwalk_core::GeometryKind::Ring,
            Lattice::Segment => qwalk_core::GeometryKind::ReflectiveSegment,
        };
        Geometry::new(kind, self.sites()).map_err(|e| CliError::config(e.to_string()))
    }

    /// Sorted, deduplicated snapshot times.
    pub fn snapshot_times(&self) -> Vec<usize> {
        let mut t = self
            .run
            .snapshot_times
            .clone()
            .unwrap_or_else(|| vec![self.run.steps]);
        t.sort_unstable();
        t.dedup();
        t
    }

    pub fn is_scalar_time(&self, t: usize) -> bool {
        t % self.run.scalar_stride.max(1) == 0 || t == self.run.steps
    }

    pub fn wants(&self, o: Observable) -> bool {
        self.run.observables.contains(&o)
    }

    pub fn quad_points(&self, t: usize) -> usize {
        self.oracle
            .quad_points
            .unwrap_or_else(|| qwalk_core::oracle::default_quad_points(t))
    }

    /// Checks every constraint and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        let run = &self.run;
        if run.steps == 0 {
            v.push("run.steps must be at least 1".to_string());
        }
        if run.realizations == 0 {
            v.push("run.realizations must be at least 1".to_string());
        }
        if run.realizations > u32::MAX as usize {
            v.push(format!("run.realizations must not exceed {}", u32::MAX));
        }
        if run.disorder.is_empty() {
            v.push("run.disorder must list at least one strength".to_string());
        }
        for &w in &run.disorder {
            if !(0.0..=1.0).contains(&w) {
                v.push(format!("run.disorder value {w} lies outside [0, 1]"));
            }
        }
        let mut seen = Vec::new();
        for &w in &run.disorder {
            if seen.contains(&w.to_bits()) {
                v.push(format!("run.disorder lists {w} twice"));
            }
            seen.push(w.to_bits());
        }
        if run.scalar_stride == 0 {
            v.push("run.scalar_stride must be at least 1".to_string());
        }
        if run.observables.is_empty() {
            v.push("run.observables must select at least one observable".to_string());
        }
        if let Some(times) = &run.snapshot_times {
            if let Some(&t) = times.iter().find(|&&t| t > run.steps) {
                v.push(format!(
                    "run.snapshot_times entry {t} exceeds run.steps = {}",
                    run.steps
                ));
            }
        }
        let sites = self.sites();
        if sites < 3 || sites % 2 == 0 {
            v.push(format!(
                "geometry.sites = {sites} must be odd and at least 3"
            ));
        }
        if self.geometry.kind == Lattice::Line && sites < 2 * run.steps + 1 {
            v.push(format!(
                "geometry.sites = {sites} is too small for {} steps on the line; need at least {}",
                run.steps,
                2 * run.steps + 1
            ));
        }
        if let SmoothingSetting::Weight(w) = self.analysis.smoothing {
            if !(w > 0.0 && w.is_finite()) {
                v.push(format!("analysis.smoothing weight {w} must be positive"));
            }
        }
        if self.wants(Observable::Sigma) && run.scalar_stride > 0 && run.steps > 0 {
            let samples = (1..=run.steps).filter(|&t| self.is_scalar_time(t)).count();
            if samples < 10 {
                v.push(format!(
                    "sigma needs at least 10 scalar samples, stride {} over {} steps gives {samples}",
                    run.scalar_stride, run.steps
                ));
            }
            if self.analysis.sigma_min_time > run.steps {
                v.push(format!(
                    "analysis.sigma_min_time = {} exceeds run.steps",
                    self.analysis.sigma_min_time
                ));
            }
        }
        if let Some(m) = self.oracle.quad_points {
            if let Some(&t) = self.oracle.times.iter().find(|&&t| m < 8 * (t + 1)) {
                v.push(format!(
                    "oracle.quad_points = {m} cannot resolve t = {t}; need at least {}",
                    8 * (t + 1)
                ));
            }
        }
        if run.disorder.len() <= u32::MAX as usize && run.realizations <= u32::MAX as usize {
            if let Some(clash) =
                seed_collision(run.master_seed, run.disorder.len(), run.realizations)
            {
                v.push(clash);
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(v))
        }
    }
}

/// Exhaustive check that every (W index, realization) pair gets its own
/// seed.
fn seed_collision(master: u64, strengths: usize, realizations: usize) -> Option<String> {
    let mut seen = HashSet::with_capacity(strengths * realizations);
    for w in 0..strengths as u32 {
        for i in 0..realizations as u32 {
            if !seen.insert(derive_seed(master, w, i)) {
                return Some(format!(
                    "derived seed collision at W index {w}, realization {i}"
                ));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(c.sites(), 201);
        assert_eq!(c.run.realizations, 1000);
        assert_eq!(c.run.disorder, DEFAULT_DISORDER);
        assert_eq!(c.snapshot_times(), vec![100]);
    }

    #[test]
    fn empty_document_is_the_default() {
        assert_eq!(
            ExperimentConfig::from_toml_str("").unwrap(),
            ExperimentConfig::default()
        );
    }

    #[test]
    fn nested_sections_parse() {
        let c = ExperimentConfig::from_toml_str(
            r#"
            [geometry]
            kind = "ring"
            sites = 61

            [run]
            steps = 300
            realizations = 50
            disorder = [0.0, 1.0]
            observables = ["mixing", "msd"]
            snapshot_times = [300, 100]

            [output]
            format = "json"
            path = "out.json"

            [analysis]
            smoothing = 2.5
            "#,
        )
        .unwrap();
        c.validate().unwrap();
        assert_eq!(c.geometry.kind, Lattice::Ring);
        assert_eq!(c.lattice().unwrap().sites(), 61);
        assert_eq!(c.snapshot_times(), vec![100, 300]);
        assert_eq!(c.output.format, Format::Json);
        assert_eq!(c.analysis.smoothing, SmoothingSetting::Weight(2.5));
        let gcv = ExperimentConfig::from_toml_str("[analysis]\nsmoothing = \"gcv\"").unwrap();
        assert_eq!(gcv.analysis.smoothing.to_smoothing(), Smoothing::Gcv);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_toml_str("[run]\nstep = 3").is_err());
        assert!(ExperimentConfig::from_toml_str("[geometry]\nkind = \"torus\"").is_err());
    }

    #[test]
    fn every_violation_is_reported() {
        let mut c = ExperimentConfig::default();
        c.geometry.sites = Some(100);
        c.run.realizations = 0;
        c.run.disorder = vec![0.5, 1.5, 0.5];
        c.run.snapshot_times = Some(vec![101]);
        c.analysis.smoothing = SmoothingSetting::Weight(-1.0);
        let Err(CliError::Config(v)) = c.validate() else {
            panic!("expected a config error");
        };
        assert_eq!(v.len(), 7, "{v:#?}");
    }

    #[test]
    fn line_window_must_cover_light_cone() {
        let mut c = ExperimentConfig::default();
        c.geometry.sites = Some(199);
        assert!(c.validate().is_err());
        c.geometry.sites = Some(203);
        c.validate().unwrap();
    }

    #[test]
    fn overrides_replace_file_values() {
        let mut c = ExperimentConfig::default();
        c.apply(Overrides {
            steps: Some(7),
            disorder: Some(vec![0.3]),
            lattice: Some(Lattice::Segment),
            ..Overrides::default()
        });
        assert_eq!(c.run.steps, 7);
        assert_eq!(c.run.disorder, vec![0.3]);
        assert_eq!(c.sites(), DEFAULT_FINITE_SITES);
        assert_eq!(c.run.realizations, 1000);
    }

    #[test]
    fn sigma_needs_enough_samples() {
        let mut c = ExperimentConfig::default();
        c.run.steps = 20;
        c.run.scalar_stride = 5;
        assert!(c.validate().is_err());
        c.run.observables = vec![Observable::Msd];
        c.validate().unwrap();
    }

    #[test]
    fn oracle_points_must_resolve_every_time() {
        let mut c = ExperimentConfig::default();
        c.oracle.quad_points = Some(400);
        assert!(c.validate().is_err());
        c.oracle.quad_points = Some(808);
        c.validate().unwrap();
    }
}
