//! Seeded Monte Carlo sweeps.
//!
//! Random streams are keyed by `(base_seed, trial, role, ...)` and not by the
//! sweep point, so every sweep value sees the same placements, shadowing and
//! data symbols for a given trial.

use rayon::prelude::*;

use super::config::{Algorithm, DeltaSetting, MSetting, Phi0Mode, Placement, SweepConfig, SweepValue, SweepVar};
use super::output::{SweepResult, SweepRow};
use super::placement::{fixed_grid_placement, uniform_cr_placement};
use crate::channel::{convolve, draw_shadowing, gen_noise, realize_taps, TapRealization};
use crate::cyclo::{default_delta, fvc_from_values, min_samples, select_m, CyclicKernel};
use crate::localize::{cyclic_wcl, improved_cyclic_wcl, suboptimal_threshold, wcl};
use crate::rng::{role, stream};
use crate::signals::{generate, SignalKind, SampleBuffer};
use crate::theory::{
    cac_moments_per_cr, fvc_per_cr, optimal_threshold, relative_to, rmse_theoretical, theta_moments, ThetaStats,
};
use crate::{Complex, Error, Point, Result};

pub const THEORY_CYCLIC: &str = "CyclicWCL-theory";
pub const THEORY_IMPROVED: &str = "ImprovedCyclicWCL-theory";

/// Applies one sweep value to a copy of the configuration.
pub fn apply_sweep_value(cfg: &SweepConfig, value: &SweepValue) -> Result<SweepConfig> {
    let mut c = cfg.clone();
    let Some(var) = cfg.sweep_var else { return Ok(c) };
    let bad = || Error::InvalidArgument(format!("sweep value '{value}' does not fit {var:?}"));
    match (var, value) {
        (SweepVar::TransmitPowerRatioDb, SweepValue::Num(r)) => c.scenario.p_i_dbm = c.scenario.p_t_dbm - r,
        (SweepVar::InterfererLocation, SweepValue::Loc(p)) => c.scenario.interferer_loc = *p,
        (SweepVar::CrCount, SweepValue::Num(k)) => {
            if c.placement != Placement::UniformRandom {
                return Err(Error::InvalidArgument("a CR-count sweep needs uniform placement".into()));
            }
            c.k = *k as usize;
        }
        (SweepVar::SampleCountN, SweepValue::Num(n)) => c.n = Some(*n as usize),
        (SweepVar::DeltaAlpha, SweepValue::Num(d)) => {
            if c.signal_i.kind != SignalKind::SingleCarrier {
                return Err(Error::InvalidArgument("a Δα sweep needs a single-carrier interferer".into()));
            }
            if c.n.is_none() && c.assumed_alpha_i.is_none() {
                c.assumed_alpha_i = Some(cfg.signal_i.cyclic_frequency());
            }
            c.signal_i.symbol_period = 1.0 / (cfg.signal_t.cyclic_frequency() + d);
        }
        (SweepVar::ShadowSigmaDb, SweepValue::Num(s)) => c.scenario.sigma_q_db = *s,
        (SweepVar::ChannelModel, SweepValue::Name(n)) => {
            c.channel = super::config::ChannelModel::parse(n).ok_or_else(bad)?
        }
        _ => return Err(bad()),
    }
    c.validate()?;
    Ok(c)
}

/// Samples per CAC realization.
pub fn resolve_n(cfg: &SweepConfig) -> Result<usize> {
    match cfg.n {
        Some(n) if n >= 1 => Ok(n),
        Some(_) => Err(Error::InvalidArgument("N must be positive".into())),
        None => min_samples(
            cfg.scenario.fs,
            cfg.signal_t.cyclic_frequency(),
            cfg.assumed_alpha_i.unwrap_or(cfg.signal_i.cyclic_frequency()),
        ),
    }
}

/// What one trial observes at every CR.
#[derive(Clone, Debug)]
pub struct Observation {
    pub locs: Vec<Point>,
    /// Received target / interferer powers in mW.
    pub p_t: Vec<f64>,
    pub p_i: Vec<f64>,
    /// `cac[k][m]`: CAC at `α_t` of realization `m` at CR `k`.
    pub cac: Vec<Vec<Complex>>,
    /// `|R̂(α = 0)|²` of the last realization at each CR.
    pub power_strengths: Vec<f64>,
}

impl Observation {
    pub fn m(&self) -> usize {
        self.cac.first().map_or(0, Vec::len)
    }

    /// `|R̂|²` of the last realization.
    pub fn strengths(&self) -> Vec<f64> {
        self.cac.iter().map(|v| v.last().map_or(0.0, |c| c.norm_sqr())).collect()
    }

    pub fn fvc(&self) -> Result<Vec<f64>> {
        self.cac
            .iter()
            .enumerate()
            .map(|(k, v)| fvc_from_values(v).map(|r| r.phi_hat).map_err(|e| e.in_trial(0, Some(k))))
            .collect()
    }
}

#[derive(Clone, Debug, Default)]
struct TrialOutcome {
    err2: Vec<f64>,
    phi0: Option<f64>,
    theory_cyclic: Option<f64>,
    theory_improved: Option<f64>,
}

/// One sweep point with everything that does not change between trials.
pub struct PointContext {
    pub cfg: SweepConfig,
    pub n: usize,
    pub stats: Option<ThetaStats>,
    kernel_t: CyclicKernel,
    kernel_0: CyclicKernel,
    needs_fvc: bool,
}

impl PointContext {
    pub fn new(cfg: SweepConfig) -> Result<Self> {
        let n = resolve_n(&cfg)?;
        let fs = cfg.scenario.fs;
        let needs_fvc = cfg.algorithms.contains(&Algorithm::ImprovedCyclicWcl);
        let needs_stats = cfg.theory
            || (needs_fvc && (cfg.m == MSetting::Auto || cfg.phi0_mode == Phi0Mode::Optimal));
        let stats = if needs_stats {
            let sigma = cfg.scenario.noise_variance();
            Some(theta_moments(&cfg.signal_t, &cfg.signal_i, n, fs, sigma)?)
        } else {
            None
        };
        let alpha_t = cfg.signal_t.cyclic_frequency();
        Ok(PointContext {
            kernel_t: CyclicKernel::new(alpha_t, fs, n),
            kernel_0: CyclicKernel::new(0.0, fs, n),
            cfg,
            n,
            stats,
            needs_fvc,
        })
    }

    fn placement(&self, trial: usize) -> Vec<Point> {
        let c = &self.cfg;
        match &c.placement {
            Placement::FixedGrid => {
                let t = c.scenario.target_loc;
                fixed_grid_placement().into_iter().map(|p| Point::new(p.x + t.x, p.y + t.y)).collect()
            }
            Placement::Explicit(l) => l.clone(),
            Placement::UniformRandom => {
                let mut rng = stream(c.base_seed, &[trial as u64, role::PLACEMENT]);
                uniform_cr_placement(c.k, c.scenario.side_a, c.scenario.target_loc, &mut rng)
            }
        }
    }

    /// Realization count for a trial with the given received powers.
    pub fn realizations(&self, p_t: &[f64], p_i: &[f64]) -> Result<usize> {
        if !self.needs_fvc {
            return Ok(1);
        }
        match self.cfg.m {
            MSetting::Fixed(m) => Ok(m),
            MSetting::Auto => {
                let stats = self.stats.as_ref().expect("stats computed for automatic M");
                let moments = cac_moments_per_cr(p_t, p_i, stats)?;
                let delta = match self.cfg.delta {
                    DeltaSetting::Fixed(d) => d,
                    DeltaSetting::Auto => default_delta(&fvc_per_cr(p_t, p_i, stats)?).0,
                };
                select_m(&moments, self.cfg.beta, delta)
            }
        }
    }

    /// Draws the geometry, signals and noise of one trial and measures the
    /// CACs at every CR.
    pub fn observe(&self, trial: usize) -> Result<Observation> {
        let c = &self.cfg;
        let seed = c.base_seed;
        let tr = trial as u64;
        let locs = self.placement(trial);
        let mut scenario = c.scenario.clone();
        scenario.cr_locs = locs.clone();
        scenario.validate()?;
        let k = locs.len();
        let q_t = draw_shadowing(scenario.sigma_q_db, k, &mut stream(seed, &[tr, role::SHADOW_TARGET]))?;
        let q_i = draw_shadowing(scenario.sigma_q_db, k, &mut stream(seed, &[tr, role::SHADOW_INTERFERER]))?;
        let (p_t, p_i) = scenario.received_powers_mw(&q_t, &q_i)?;
        let m = self.realizations(&p_t, &p_i)?;
        let fs = scenario.fs;
        let sigma = scenario.noise_variance();
        let n = self.n;

        let (taps, guard) = match &c.channel.profile {
            None => (None, 0),
            Some(profile) => {
                let draw = |cr: usize, which: u64| realize_taps(profile, fs, &mut stream(seed, &[tr, role::CHANNEL, cr as u64, which]));
                let t: Vec<(TapRealization, TapRealization)> = (0..k).map(|cr| (draw(cr, 0), draw(cr, 1))).collect();
                (Some(t), profile.max_delay_samples(fs))
            }
        };

        let mut cac = vec![Vec::with_capacity(m); k];
        let mut power_strengths = vec![0.0; k];
        for r in 0..m {
            let st = generate(&c.signal_t, n + guard, fs, &mut stream(seed, &[tr, role::TARGET_SIGNAL, r as u64]))?;
            let si = generate(&c.signal_i, n + guard, fs, &mut stream(seed, &[tr, role::INTERFERER_SIGNAL, r as u64]))?;
            for cr in 0..k {
                let (st_k, si_k): (SampleBuffer, SampleBuffer) = match &taps {
                    None => (st.clone(), si.clone()),
                    Some(t) => (convolve(&st, &t[cr].0).skip(guard), convolve(&si, &t[cr].1).skip(guard)),
                };
                let (a, b) = (p_t[cr].sqrt(), p_i[cr].sqrt());
                let mut noise_rng = stream(seed, &[tr, role::NOISE, cr as u64, r as u64]);
                let w = if sigma > 0.0 { Some(gen_noise(n, sigma, fs, &mut noise_rng)) } else { None };
                let power: Vec<f64> = (0..n)
                    .map(|j| {
                        let mut v = st_k.samples[j] * a + si_k.samples[j] * b;
                        if let Some(w) = &w {
                            v += w.samples[j];
                        }
                        v.norm_sqr()
                    })
                    .collect();
                cac[cr].push(self.kernel_t.apply(power.iter().copied()));
                if r + 1 == m {
                    power_strengths[cr] = self.kernel_0.apply(power.iter().copied()).norm_sqr();
                }
            }
        }
        Ok(Observation { locs, p_t, p_i, cac, power_strengths })
    }

    fn evaluate(&self, obs: &Observation) -> Result<TrialOutcome> {
        let c = &self.cfg;
        let target = c.scenario.target_loc;
        let strengths = obs.strengths();
        let rel = relative_to(&obs.locs, target);
        let mut out = TrialOutcome::default();
        let fvc = if self.needs_fvc { Some(obs.fvc()?) } else { None };
        for alg in &c.algorithms {
            let est = match alg {
                Algorithm::Wcl => wcl(&obs.locs, &obs.power_strengths)?,
                Algorithm::CyclicWcl => cyclic_wcl(&obs.locs, &strengths)?,
                Algorithm::ImprovedCyclicWcl => {
                    let fvc = fvc.as_ref().expect("fvc computed");
                    let phi0 = match c.phi0_mode {
                        Phi0Mode::Fixed(p) => p,
                        Phi0Mode::Suboptimal => suboptimal_threshold(&obs.locs, &strengths, fvc)?.phi0,
                        Phi0Mode::Optimal => {
                            let stats = self.stats.as_ref().expect("stats computed for optimal threshold");
                            optimal_threshold(&obs.p_t, &obs.p_i, &rel, fvc, stats)?.phi0_opt
                        }
                    };
                    out.phi0 = Some(phi0);
                    improved_cyclic_wcl(&obs.locs, &strengths, fvc, phi0)?
                }
            };
            out.err2.push(est.point().sub(target).norm_sq());
        }
        if c.theory {
            let stats = self.stats.as_ref().expect("stats computed for theory rows");
            let all = vec![true; rel.len()];
            out.theory_cyclic = Some(rmse_theoretical(&obs.p_t, &obs.p_i, &rel, &all, stats)?.epsilon.powi(2));
            if let (Some(phi0), Some(fvc)) = (out.phi0, &fvc) {
                let s0: Vec<bool> = fvc.iter().map(|&p| p <= phi0).collect();
                out.theory_improved = Some(rmse_theoretical(&obs.p_t, &obs.p_i, &rel, &s0, stats)?.epsilon.powi(2));
            }
        }
        Ok(out)
    }

    fn trial(&self, trial: usize) -> Result<TrialOutcome> {
        let obs = self.observe(trial).map_err(|e| attach(e, trial))?;
        self.evaluate(&obs).map_err(|e| attach(e, trial))
    }
}

fn attach(e: Error, trial: usize) -> Error {
    match e {
        Error::Trial { cr, source, .. } => Error::Trial { trial, cr, source },
        other => other.in_trial(trial, None),
    }
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// Runs every sweep value and algorithm; rows are ordered by sweep value,
/// then algorithm, then theory rows.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for value in &cfg.sweep_values {
        let ctx = PointContext::new(apply_sweep_value(cfg, value)?)?;
        let outcomes: Vec<TrialOutcome> =
            (0..cfg.trials).into_par_iter().map(|t| ctx.trial(t)).collect::<Result<Vec<_>>>()?;
        let label = value.to_string();
        for (j, alg) in cfg.algorithms.iter().enumerate() {
            let phi0 = (*alg == Algorithm::ImprovedCyclicWcl).then(|| mean(outcomes.iter().filter_map(|o| o.phi0)));
            rows.push(SweepRow {
                sweep_value: label.clone(),
                algorithm: alg.name().to_string(),
                rmse_m: mean(outcomes.iter().map(|o| o.err2[j])).sqrt(),
                trials: cfg.trials,
                mean_phi0: phi0,
                seed: cfg.base_seed,
            });
        }
        if cfg.theory {
            for (name, pick) in [
                (THEORY_CYCLIC, (|o: &TrialOutcome| o.theory_cyclic) as fn(&TrialOutcome) -> Option<f64>),
                (THEORY_IMPROVED, |o: &TrialOutcome| o.theory_improved),
            ] {
                let vals: Vec<f64> = outcomes.iter().filter_map(pick).collect();
                if vals.is_empty() {
                    continue;
                }
                rows.push(SweepRow {
                    sweep_value: label.clone(),
                    algorithm: name.to_string(),
                    rmse_m: mean(vals.iter().copied()).sqrt(),
                    trials: vals.len(),
                    mean_phi0: None,
                    seed: cfg.base_seed,
                });
            }
        }
    }
    Ok(SweepResult { rows })
}
