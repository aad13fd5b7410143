//! Flat key-value scenario configuration.
//!
//! One `key = value` per line, `#` starts a comment, blank lines ignored.
//! Every scenario kind has a complete default parameter set, so a config
//! file only needs the keys it wants to change; unknown or out-of-place
//! keys are rejected with the offending line number. `serialize` emits
//! the canonical form: parse(serialize(c)) == c for every valid config.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::SimError;
use crate::model::{resonant_donor_delta, ChainSpec, MoleculeSpec, TriadSpec};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Triad,
    EntropyMap,
    Chain,
    FiveArm,
    SelectionTable,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Triad => "triad",
            ScenarioKind::EntropyMap => "entropy-map",
            ScenarioKind::Chain => "chain",
            ScenarioKind::FiveArm => "five-arm",
            ScenarioKind::SelectionTable => "selection-table",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "triad" => Ok(ScenarioKind::Triad),
            "entropy-map" => Ok(ScenarioKind::EntropyMap),
            "chain" => Ok(ScenarioKind::Chain),
            "five-arm" => Ok(ScenarioKind::FiveArm),
            "selection-table" => Ok(ScenarioKind::SelectionTable),
            other => Err(SimError::Config(format!("unknown scenario kind {other:?}"))),
        }
    }

    /// Keys this kind accepts, in canonical serialization order.
    fn keys(&self) -> &'static [&'static str] {
        match self {
            ScenarioKind::Triad => &[
                "arm_count",
                "delta_0",
                "tau_0",
                "delta_1",
                "tau_1",
                "qc_element",
                "detuning",
                "t_max",
                "samples",
            ],
            ScenarioKind::EntropyMap => &[
                "arm_count",
                "delta_0",
                "tau_0",
                "delta_1",
                "tau_1",
                "qc_element",
                "gamma_min",
                "gamma_max",
                "gamma_samples",
                "t_max",
                "samples",
            ],
            ScenarioKind::Chain => &[
                "arm_count",
                "delta_1",
                "tau_1",
                "qc_element",
                "detuning",
                "eta",
                "half_length",
                "chain_coupling",
                "t_max",
                "samples",
            ],
            ScenarioKind::FiveArm => &[
                "arm_count",
                "delta_0",
                "tau_0",
                "delta_1",
                "tau_1",
                "qc_element",
                "detuning",
                "t_max",
                "samples",
            ],
            ScenarioKind::SelectionTable => &["arm_count", "qc_element"],
        }
    }
}

/// Donor-to-chain coupling convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainCoupling {
    /// M sqrt(2/3), the two-level reduction value (default).
    Bell,
    /// 3M, the unnormalized pair-operator reading.
    Literal,
}

impl ChainCoupling {
    fn as_str(&self) -> &'static str {
        match self {
            ChainCoupling::Bell => "bell",
            ChainCoupling::Literal => "literal",
        }
    }
}

/// Fully resolved parameters for one scenario run.
///
/// `delta_0 = None` means the donor on-arm energy is anchored so that the
/// zero-EAM donor mode sits at twice the |q| = 1 acceptor mode energy
/// (written `resonant` in config files).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub arm_count: usize,
    pub delta_0: Option<f64>,
    pub tau_0: Complex64,
    pub delta_1: f64,
    pub tau_1: Complex64,
    pub qc_element: Complex64,
    pub detuning: f64,
    pub eta: Complex64,
    pub half_length: usize,
    pub chain_coupling: ChainCoupling,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub gamma_samples: usize,
    pub t_max: f64,
    pub samples: usize,
}

impl ScenarioConfig {
    /// Built-in parameter set for one kind.
    ///
    /// Triad and entropy-map defaults put the acceptor |q| = 1 mode at
    /// unit energy; chain defaults follow the wave-packet figure
    /// (pair energy eta/2 per exciton, cutting element eta/6, 60 sites a
    /// side); five-arm defaults follow the entangled-EAM figure
    /// (cutting element 5% of the |q| = 1 mode energy, hopping
    /// delta_1/15, detuning 1.077).
    pub fn defaults(kind: ScenarioKind) -> Self {
        let mut c = ScenarioConfig {
            kind,
            arm_count: 3,
            delta_0: None,
            tau_0: Complex64::ZERO,
            delta_1: 1.2,
            tau_1: Complex64::new(0.2, 0.0),
            qc_element: Complex64::new(0.1, 0.0),
            detuning: 1.0,
            eta: Complex64::new(1.0, 0.0),
            half_length: 60,
            chain_coupling: ChainCoupling::Bell,
            gamma_min: 0.9,
            gamma_max: 1.1,
            gamma_samples: 81,
            t_max: 120.0,
            samples: 1201,
        };
        match kind {
            ScenarioKind::Triad => {}
            ScenarioKind::EntropyMap => {
                c.t_max = 100.0;
                c.samples = 2001;
            }
            ScenarioKind::Chain => {
                c.delta_1 = 0.75;
                c.tau_1 = Complex64::new(0.25, 0.0);
                c.qc_element = Complex64::new(1.0 / 6.0, 0.0);
                c.t_max = 40.0;
                c.samples = 401;
            }
            ScenarioKind::FiveArm => {
                c.arm_count = 5;
                c.delta_1 = 1.0;
                c.tau_1 = Complex64::new(1.0 / 15.0, 0.0);
                let e11 = 1.0 + 2.0 / 15.0 * (std::f64::consts::TAU / 5.0).cos();
                c.qc_element = Complex64::new(0.05 * e11, 0.0);
                c.detuning = 1.077;
                c.t_max = 200.0;
                c.samples = 1001;
            }
            ScenarioKind::SelectionTable => {
                c.qc_element = Complex64::new(1.0, 0.0);
            }
        }
        c
    }

    /// Parse a config file's text against one kind's key set.
    pub fn parse(text: &str, kind: ScenarioKind) -> Result<Self> {
        let mut config = Self::defaults(kind);
        let mut seen: Vec<&str> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(SimError::Config(format!(
                    "line {line_no}: expected `key = value`, got {line:?}"
                )));
            };
            let key = key.trim();
            let value = value.trim();
            if let Some(canonical) = kind.keys().iter().find(|k| **k == key) {
                if seen.contains(canonical) {
                    return Err(SimError::Config(format!(
                        "line {line_no}: duplicate key {key:?}"
                    )));
                }
                seen.push(canonical);
            } else if key != "scenario" {
                return Err(SimError::Config(format!(
                    "line {line_no}: key {key:?} is not used by scenario {:?}",
                    kind.as_str()
                )));
            }
            config
                .set(key, value)
                .map_err(|e| SimError::Config(format!("line {line_no}: {e}")))?;
        }
        Ok(config)
    }

    /// Apply one `key=value` override on top of a parsed config.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let Some((key, value)) = assignment.split_once('=') else {
            return Err(SimError::Config(format!(
                "override {assignment:?} is not of the form key=value"
            )));
        };
        let key = key.trim();
        let value = value.trim();
        if key != "scenario" && !self.kind.keys().contains(&key) {
            return Err(SimError::Config(format!(
                "override key {key:?} is not used by scenario {:?}",
                self.kind.as_str()
            )));
        }
        self.set(key, value)
            .map_err(|e| SimError::Config(format!("override {key:?}: {e}")))
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "scenario" => {
                if value != self.kind.as_str() {
                    return Err(format!(
                        "file names scenario {value:?} but {:?} was requested",
                        self.kind.as_str()
                    ));
                }
            }
            "arm_count" => self.arm_count = parse_usize(value)?,
            "delta_0" => {
                self.delta_0 = if value == "resonant" {
                    None
                } else {
                    Some(parse_f64(value)?)
                }
            }
            "tau_0" => self.tau_0 = parse_complex(value)?,
            "delta_1" => self.delta_1 = parse_f64(value)?,
            "tau_1" => self.tau_1 = parse_complex(value)?,
            "qc_element" => self.qc_element = parse_complex(value)?,
            "detuning" => self.detuning = parse_f64(value)?,
            "eta" => self.eta = parse_complex(value)?,
            "half_length" => self.half_length = parse_usize(value)?,
            "chain_coupling" => {
                self.chain_coupling = match value {
                    "bell" => ChainCoupling::Bell,
                    "literal" => ChainCoupling::Literal,
                    other => return Err(format!("chain_coupling must be bell or literal, got {other:?}")),
                }
            }
            "gamma_min" => self.gamma_min = parse_f64(value)?,
            "gamma_max" => self.gamma_max = parse_f64(value)?,
            "gamma_samples" => self.gamma_samples = parse_usize(value)?,
            "t_max" => self.t_max = parse_f64(value)?,
            "samples" => self.samples = parse_usize(value)?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Canonical text form: the scenario line, then this kind's keys in
    /// fixed order. parse(serialize(c)) reproduces c exactly.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario = {}", self.kind.as_str());
        for &key in self.kind.keys() {
            let value = match key {
                "arm_count" => self.arm_count.to_string(),
                "delta_0" => match self.delta_0 {
                    None => "resonant".into(),
                    Some(d) => fmt_f64(d),
                },
                "tau_0" => fmt_complex(self.tau_0),
                "delta_1" => fmt_f64(self.delta_1),
                "tau_1" => fmt_complex(self.tau_1),
                "qc_element" => fmt_complex(self.qc_element),
                "detuning" => fmt_f64(self.detuning),
                "eta" => fmt_complex(self.eta),
                "half_length" => self.half_length.to_string(),
                "chain_coupling" => self.chain_coupling.as_str().into(),
                "gamma_min" => fmt_f64(self.gamma_min),
                "gamma_max" => fmt_f64(self.gamma_max),
                "gamma_samples" => self.gamma_samples.to_string(),
                "t_max" => fmt_f64(self.t_max),
                "samples" => self.samples.to_string(),
                other => unreachable!("unserialized key {other}"),
            };
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    pub fn acceptor(&self) -> Result<MoleculeSpec> {
        MoleculeSpec::new(self.arm_count, self.delta_1, self.tau_1)
    }

    /// Donor molecule, anchoring at resonance when delta_0 is unset.
    pub fn donor(&self) -> Result<MoleculeSpec> {
        let delta_0 = match self.delta_0 {
            Some(d) => d,
            None => resonant_donor_delta(&self.acceptor()?, self.tau_0),
        };
        MoleculeSpec::new(self.arm_count, delta_0, self.tau_0)
    }

    pub fn triad_spec(&self) -> Result<TriadSpec> {
        TriadSpec::new(
            self.donor()?,
            self.acceptor()?,
            self.qc_element,
            self.detuning,
        )
    }

    /// Triad with the detuning replaced, for scans.
    pub fn triad_spec_at(&self, detuning: f64) -> Result<TriadSpec> {
        TriadSpec::new(self.donor()?, self.acceptor()?, self.qc_element, detuning)
    }

    pub fn chain_spec(&self) -> Result<ChainSpec> {
        ChainSpec::new(self.triad_spec()?, self.half_length, self.eta)
    }

    /// Uniform grid over [0, t_max], `samples` points.
    pub fn time_grid(&self) -> Result<Vec<f64>> {
        if !self.t_max.is_finite() || self.t_max <= 0.0 {
            return Err(SimError::Config(format!(
                "t_max must be positive and finite, got {}",
                self.t_max
            )));
        }
        if self.samples < 2 {
            return Err(SimError::Config(format!(
                "samples must be at least 2, got {}",
                self.samples
            )));
        }
        let n = self.samples;
        Ok((0..n)
            .map(|k| k as f64 * self.t_max / (n - 1) as f64)
            .collect())
    }

    /// Uniform detuning grid over [gamma_min, gamma_max].
    pub fn gamma_grid(&self) -> Result<Vec<f64>> {
        if self.gamma_max <= self.gamma_min {
            return Err(SimError::Config(format!(
                "detuning range [{}, {}] is empty",
                self.gamma_min, self.gamma_max
            )));
        }
        if self.gamma_samples < 2 {
            return Err(SimError::Config(format!(
                "gamma_samples must be at least 2, got {}",
                self.gamma_samples
            )));
        }
        let n = self.gamma_samples;
        let span = self.gamma_max - self.gamma_min;
        Ok((0..n)
            .map(|k| self.gamma_min + k as f64 * span / (n - 1) as f64)
            .collect())
    }
}

fn parse_f64(value: &str) -> std::result::Result<f64, String> {
    value
        .parse::<f64>()
        .map_err(|_| format!("expected a real number, got {value:?}"))
        .and_then(|x| {
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("value {value:?} is not finite"))
            }
        })
}

fn parse_usize(value: &str) -> std::result::Result<usize, String> {
    value
        .parse::<usize>()
        .map_err(|_| format!("expected a nonnegative integer, got {value:?}"))
}

fn parse_complex(value: &str) -> std::result::Result<Complex64, String> {
    let parsed = Complex64::from_str(value)
        .map_err(|_| format!("expected a real or a+bi complex number, got {value:?}"))?;
    if parsed.re.is_finite() && parsed.im.is_finite() {
        Ok(parsed)
    } else {
        Err(format!("value {value:?} is not finite"))
    }
}

/// Shortest representation that parses back to the same f64.
fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_f64(z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", fmt_f64(z.re), fmt_f64(-z.im))
    } else {
        format!("{}+{}i", fmt_f64(z.re), fmt_f64(z.im))
    }
}
