//! Line-oriented `key = value` scenario files.
//!
//! Blank lines and text after `#` are ignored. Unknown keys are rejected.
//! Signal parameters are prefixed with `target.` or `interferer.`:
//!
//! ```text
//! target.kind = single_carrier      # or ofdm
//! target.modulation = 4
//! target.symbol_rate = 20e6         # single carrier
//! target.subcarriers = 64           # OFDM
//! target.spacing = 312.5e3          # OFDM
//! target.cp = 0.8e-6                # OFDM
//! target.carrier = 2.4e9
//! target.pulse = rc:1.0             # rect | rc:<rolloff>
//! ```
//!
//! See `README.md` for the full key list.

use std::fmt;
use std::path::Path;

use crate::channel::{Fading, NetworkScenario, TapProfile};
use crate::signals::{Pulse, SignalKind, SignalSpec};
use crate::{Error, Point, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Wcl,
    CyclicWcl,
    ImprovedCyclicWcl,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Wcl, Algorithm::CyclicWcl, Algorithm::ImprovedCyclicWcl];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Wcl => "WCL",
            Algorithm::CyclicWcl => "CyclicWCL",
            Algorithm::ImprovedCyclicWcl => "ImprovedCyclicWCL",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().replace(['_', '-'], "").as_str() {
            "wcl" => Some(Algorithm::Wcl),
            "cyclicwcl" => Some(Algorithm::CyclicWcl),
            "improvedcyclicwcl" | "improved" => Some(Algorithm::ImprovedCyclicWcl),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVar {
    TransmitPowerRatioDb,
    InterfererLocation,
    CrCount,
    SampleCountN,
    DeltaAlpha,
    ShadowSigmaDb,
    ChannelModel,
}

impl SweepVar {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "rho_db" | "power_ratio_db" => SweepVar::TransmitPowerRatioDb,
            "interferer_location" | "interferer" => SweepVar::InterfererLocation,
            "k" | "cr_count" => SweepVar::CrCount,
            "n" | "samples" => SweepVar::SampleCountN,
            "delta_alpha" => SweepVar::DeltaAlpha,
            "sigma_q_db" | "shadowing" => SweepVar::ShadowSigmaDb,
            "channel" => SweepVar::ChannelModel,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SweepValue {
    Num(f64),
    Loc(Point),
    Name(String),
}

impl fmt::Display for SweepValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepValue::Num(v) => write!(f, "{v}"),
            SweepValue::Loc(p) => write!(f, "{p}"),
            SweepValue::Name(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Placement {
    FixedGrid,
    UniformRandom,
    Explicit(Vec<Point>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MSetting {
    Fixed(usize),
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DeltaSetting {
    Fixed(f64),
    /// Smallest gap between the theoretical FVC values, floored.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Phi0Mode {
    Suboptimal,
    Optimal,
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelModel {
    pub name: String,
    pub profile: Option<TapProfile>,
}

impl ChannelModel {
    pub fn none() -> Self {
        ChannelModel { name: "none".into(), profile: None }
    }

    /// `none`, `flat_rayleigh`, or `exp:<taps>:<spacing s>:<decay dB>[:static]`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let profile = match s {
            "none" => None,
            "flat_rayleigh" => Some(TapProfile::new(&[(0.0, 0.0)], 0.0, Fading::RayleighPerTrial).ok()?),
            _ => {
                let parts: Vec<&str> = s.split(':').collect();
                if parts[0] != "exp" || !(4..=5).contains(&parts.len()) {
                    return None;
                }
                let taps: usize = parts[1].parse().ok()?;
                let spacing: f64 = parts[2].parse().ok()?;
                let decay: f64 = parts[3].parse().ok()?;
                let fading = match parts.get(4) {
                    None | Some(&"rayleigh") => Fading::RayleighPerTrial,
                    Some(&"static") => Fading::Static,
                    _ => return None,
                };
                Some(TapProfile::exponential(taps, spacing, decay, fading).ok()?)
            }
        };
        Some(ChannelModel { name: s.to_string(), profile })
    }
}

/// Everything needed to run one sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    /// Scenario template; `cr_locs` is filled per trial from `placement`.
    pub scenario: NetworkScenario,
    pub k: usize,
    pub signal_t: SignalSpec,
    pub signal_i: SignalSpec,
    /// `None` selects `N = min_samples(fs, α_t, α̂_i)`.
    pub n: Option<usize>,
    /// Interferer cyclic frequency assumed when choosing `N` automatically.
    pub assumed_alpha_i: Option<f64>,
    pub channel: ChannelModel,
    pub sweep_var: Option<SweepVar>,
    pub sweep_values: Vec<SweepValue>,
    pub algorithms: Vec<Algorithm>,
    pub trials: usize,
    pub placement: Placement,
    pub base_seed: u64,
    pub m: MSetting,
    pub beta: f64,
    pub delta: DeltaSetting,
    pub phi0_mode: Phi0Mode,
    pub theory: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            scenario: NetworkScenario {
                target_loc: Point::ORIGIN,
                interferer_loc: Point::new(20.0, 20.0),
                cr_locs: Vec::new(),
                p_t_dbm: 20.0,
                p_i_dbm: 30.0,
                gamma: 3.8,
                d0: 1.0,
                sigma_q_db: 0.0,
                noise_psd_dbm_hz: -174.0,
                fs: 200e6,
                side_a: 100.0,
            },
            k: 50,
            signal_t: SignalSpec::single_carrier(4, 20e6, 2.4e9),
            signal_i: SignalSpec::single_carrier(4, 25e6, 2.4e9),
            n: Some(500),
            assumed_alpha_i: None,
            channel: ChannelModel::none(),
            sweep_var: None,
            sweep_values: vec![SweepValue::Name("base".into())],
            algorithms: Algorithm::ALL.to_vec(),
            trials: 200,
            placement: Placement::UniformRandom,
            base_seed: 1,
            m: MSetting::Fixed(60),
            beta: 0.9,
            delta: DeltaSetting::Fixed(0.01),
            phi0_mode: Phi0Mode::Suboptimal,
            theory: false,
        }
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

fn num(line: usize, v: &str) -> Result<f64> {
    v.trim().parse::<f64>().map_err(|_| err(line, format!("expected a number, got '{v}'")))
}

fn int(line: usize, v: &str) -> Result<usize> {
    v.trim().parse::<usize>().map_err(|_| err(line, format!("expected a non-negative integer, got '{v}'")))
}

pub fn parse_point(s: &str) -> Option<Point> {
    let (x, y) = s.trim().split_once(':')?;
    Some(Point::new(x.trim().parse().ok()?, y.trim().parse().ok()?))
}

fn point(line: usize, v: &str) -> Result<Point> {
    parse_point(v).ok_or_else(|| err(line, format!("expected x:y, got '{v}'")))
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Partially specified signal, completed after all lines are read.
#[derive(Default)]
struct SignalDraft {
    kind: Option<SignalKind>,
    modulation: Option<u32>,
    symbol_rate: Option<f64>,
    subcarriers: Option<usize>,
    spacing: Option<f64>,
    cp: Option<f64>,
    carrier: Option<f64>,
    pulse: Option<Pulse>,
}

impl SignalDraft {
    fn set(&mut self, line: usize, key: &str, v: &str) -> Result<()> {
        match key {
            "kind" => {
                self.kind = Some(match v {
                    "single_carrier" | "sc" => SignalKind::SingleCarrier,
                    "ofdm" => SignalKind::Ofdm,
                    _ => return Err(err(line, format!("unknown signal kind '{v}'"))),
                })
            }
            "modulation" => self.modulation = Some(int(line, v)? as u32),
            "symbol_rate" => self.symbol_rate = Some(num(line, v)?),
            "subcarriers" => self.subcarriers = Some(int(line, v)?),
            "spacing" => self.spacing = Some(num(line, v)?),
            "cp" => self.cp = Some(num(line, v)?),
            "carrier" => self.carrier = Some(num(line, v)?),
            "pulse" => {
                self.pulse = Some(if v == "rect" || v == "rectangular" {
                    Pulse::Rectangular
                } else if let Some(r) = v.strip_prefix("rc:") {
                    Pulse::RaisedCosine { rolloff: num(line, r)? }
                } else {
                    return Err(err(line, format!("unknown pulse '{v}'")));
                })
            }
            _ => return Err(err(line, format!("unknown signal key '{key}'"))),
        }
        Ok(())
    }

    fn build(self, base: &SignalSpec) -> Result<SignalSpec> {
        let kind = self.kind.unwrap_or(base.kind);
        let modulation = self.modulation.unwrap_or(base.modulation_order);
        let carrier = self.carrier.unwrap_or(base.carrier_freq);
        let mut spec = match kind {
            SignalKind::SingleCarrier => {
                let rate = self.symbol_rate.unwrap_or(if base.kind == kind { 1.0 / base.symbol_period } else { 20e6 });
                SignalSpec::single_carrier(modulation, rate, carrier)
            }
            SignalKind::Ofdm => {
                let nc = self.subcarriers.ok_or_else(|| err(0, "OFDM signal needs 'subcarriers'"))?;
                let df = self.spacing.ok_or_else(|| err(0, "OFDM signal needs 'spacing'"))?;
                SignalSpec::ofdm(modulation, nc, df, self.cp.unwrap_or(0.0), carrier)
            }
        };
        if let Some(p) = self.pulse {
            spec.pulse = p;
        } else if base.kind == kind {
            spec.pulse = base.pulse;
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl SweepConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SweepConfig::default();
        let mut t = SignalDraft::default();
        let mut i = SignalDraft::default();
        let mut rho_db: Option<f64> = None;
        let mut sweep_raw: Option<(usize, String)> = None;
        let mut cr_locs: Option<Vec<Point>> = None;
        let mut placement_name: Option<String> = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, v) = body.split_once('=').ok_or_else(|| err(line, format!("expected key = value, got '{body}'")))?;
            let (key, v) = (key.trim(), v.trim());
            let sc = &mut cfg.scenario;
            if let Some(k) = key.strip_prefix("target.") {
                t.set(line, k, v)?;
                continue;
            }
            if let Some(k) = key.strip_prefix("interferer.") {
                i.set(line, k, v)?;
                continue;
            }
            match key {
                "target" => sc.target_loc = point(line, v)?,
                "interferer" => sc.interferer_loc = point(line, v)?,
                "p_t_dbm" => sc.p_t_dbm = num(line, v)?,
                "p_i_dbm" => sc.p_i_dbm = num(line, v)?,
                "rho_db" => rho_db = Some(num(line, v)?),
                "gamma" => sc.gamma = num(line, v)?,
                "d0" => sc.d0 = num(line, v)?,
                "sigma_q_db" => sc.sigma_q_db = num(line, v)?,
                "noise_psd_dbm_hz" => sc.noise_psd_dbm_hz = num(line, v)?,
                "fs" => sc.fs = num(line, v)?,
                "side_a" => sc.side_a = num(line, v)?,
                "k" => cfg.k = int(line, v)?,
                "placement" => placement_name = Some(v.to_string()),
                "cr_locs" => cr_locs = Some(list(v).map(|p| point(line, p)).collect::<Result<_>>()?),
                "n" => cfg.n = if v == "auto" { None } else { Some(int(line, v)?) },
                "assumed_alpha_i" => cfg.assumed_alpha_i = Some(num(line, v)?),
                "channel" => {
                    cfg.channel = ChannelModel::parse(v).ok_or_else(|| err(line, format!("unknown channel '{v}'")))?
                }
                "sweep" => sweep_raw = Some((line, v.to_string())),
                "values" => {
                    cfg.sweep_values = list(v).map(|s| SweepValue::Name(s.to_string())).collect();
                }
                "algorithms" => {
                    cfg.algorithms = list(v)
                        .map(|a| Algorithm::parse(a).ok_or_else(|| err(line, format!("unknown algorithm '{a}'"))))
                        .collect::<Result<_>>()?
                }
                "trials" => cfg.trials = int(line, v)?,
                "seed" => cfg.base_seed = v.parse().map_err(|_| err(line, format!("bad seed '{v}'")))?,
                "m" => cfg.m = if v == "auto" { MSetting::Auto } else { MSetting::Fixed(int(line, v)?) },
                "beta" => cfg.beta = num(line, v)?,
                "delta" => cfg.delta = if v == "auto" { DeltaSetting::Auto } else { DeltaSetting::Fixed(num(line, v)?) },
                "phi0" => {
                    cfg.phi0_mode = match v {
                        "suboptimal" => Phi0Mode::Suboptimal,
                        "optimal" => Phi0Mode::Optimal,
                        _ => Phi0Mode::Fixed(num(line, v)?),
                    }
                }
                "theory" => {
                    cfg.theory = match v {
                        "true" | "yes" | "1" => true,
                        "false" | "no" | "0" => false,
                        _ => return Err(err(line, format!("expected a boolean, got '{v}'"))),
                    }
                }
                _ => return Err(err(line, format!("unknown key '{key}'"))),
            }
        }
        cfg.signal_t = t.build(&cfg.signal_t)?;
        cfg.signal_i = i.build(&cfg.signal_i)?;
        if let Some(r) = rho_db {
            cfg.scenario.p_i_dbm = cfg.scenario.p_t_dbm - r;
        }
        cfg.placement = match (placement_name.as_deref(), cr_locs) {
            (Some("fixed_grid"), _) => Placement::FixedGrid,
            (Some("uniform") | None, None) => Placement::UniformRandom,
            (Some("explicit") | None, Some(l)) => Placement::Explicit(l),
            (Some(p), _) => return Err(err(0, format!("unknown or inconsistent placement '{p}'"))),
        };
        match &cfg.placement {
            Placement::FixedGrid => cfg.k = 50,
            Placement::Explicit(l) => cfg.k = l.len(),
            Placement::UniformRandom => {}
        }
        if let Some((line, name)) = sweep_raw {
            if name != "none" {
                let var = SweepVar::parse(&name).ok_or_else(|| err(line, format!("unknown sweep variable '{name}'")))?;
                cfg.sweep_var = Some(var);
                cfg.sweep_values = cfg
                    .sweep_values
                    .iter()
                    .map(|v| typed_value(var, &v.to_string()).ok_or_else(|| err(line, format!("bad sweep value '{v}'"))))
                    .collect::<Result<_>>()?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(err(0, "trials must be >= 1"));
        }
        if self.sweep_values.is_empty() {
            return Err(err(0, "sweep values must be non-empty"));
        }
        if self.algorithms.is_empty() {
            return Err(err(0, "no algorithms selected"));
        }
        if self.k < 1 {
            return Err(err(0, "k must be >= 1"));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(err(0, "beta must lie in (0, 1)"));
        }
        if let MSetting::Fixed(m) = self.m {
            if m < 2 {
                return Err(err(0, "m must be >= 2"));
            }
        }
        if self.theory && self.channel.profile.is_some() {
            return Err(err(0, "theory rows are only available without multipath"));
        }
        Ok(())
    }
}

fn typed_value(var: SweepVar, s: &str) -> Option<SweepValue> {
    match var {
        SweepVar::InterfererLocation => parse_point(s).map(SweepValue::Loc),
        SweepVar::ChannelModel => ChannelModel::parse(s).map(|c| SweepValue::Name(c.name)),
        _ => s.parse::<f64>().ok().map(SweepValue::Num),
    }
}
