//! Cyclostationary baseband waveform generators.
//!
//! Both generators evaluate the transmitted signal directly on the sampling
//! grid `t = n / fs`:
//!
//! ```text
//! single carrier:  s(n) = e^{j2π f t} Σ_l a_l g(t/T - l)
//! OFDM:            s(n) = e^{j2π f t} Σ_l g(t/T - l) Σ_κ c_{κ,l} e^{j2π κ Δf t}
//! ```
//!
//! Pulse and window shapes are expressed in units of the symbol period and
//! carry a fixed amplitude so that the expected instantaneous power averages
//! to one over a symbol period. No per-realization rescaling is applied, which
//! keeps the generators linear in the data symbols (the analytic moments in
//! [`crate::theory`] depend on this).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use rand::Rng;

use crate::{Complex, Error, Result};

/// Tolerance (in symbol periods) used when deciding which symbol a sample
/// belongs to, so that boundaries land deterministically despite rounding in
/// `T * fs`.
const EDGE_EPS: f64 = 1e-9;

/// Half-length, in symbol periods, of the truncated raised-cosine pulse.
pub const RAISED_COSINE_SPAN: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignalKind {
    SingleCarrier,
    Ofdm,
}

/// Pulse shape (single carrier) or symbol window (OFDM).
///
/// For single-carrier signals `RaisedCosine` is the Nyquist raised-cosine
/// impulse response truncated to ±4 symbols. For OFDM it is a window whose
/// edges ramp over `rolloff` symbol periods, overlapping adjacent symbols.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Pulse {
    Rectangular,
    RaisedCosine { rolloff: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignalSpec {
    pub kind: SignalKind,
    pub modulation_order: u32,
    /// Symbol period `T` in seconds (OFDM: `1/Δf + T_cp`).
    pub symbol_period: f64,
    pub carrier_freq: f64,
    pub num_subcarriers: usize,
    pub subcarrier_spacing: f64,
    pub cp_duration: f64,
    pub pulse: Pulse,
}

impl SignalSpec {
    /// Default single-carrier pulse: full-rolloff raised cosine.
    pub const DEFAULT_PULSE: Pulse = Pulse::RaisedCosine { rolloff: 1.0 };

    pub fn single_carrier(modulation_order: u32, symbol_rate: f64, carrier_freq: f64) -> Self {
        SignalSpec {
            kind: SignalKind::SingleCarrier,
            modulation_order,
            symbol_period: 1.0 / symbol_rate,
            carrier_freq,
            num_subcarriers: 1,
            subcarrier_spacing: 0.0,
            cp_duration: 0.0,
            pulse: Self::DEFAULT_PULSE,
        }
    }

    /// OFDM signal with a rectangular window covering useful part and prefix.
    pub fn ofdm(
        modulation_order: u32,
        num_subcarriers: usize,
        subcarrier_spacing: f64,
        cp_duration: f64,
        carrier_freq: f64,
    ) -> Self {
        SignalSpec {
            kind: SignalKind::Ofdm,
            modulation_order,
            symbol_period: 1.0 / subcarrier_spacing + cp_duration,
            carrier_freq,
            num_subcarriers,
            subcarrier_spacing,
            cp_duration,
            pulse: Pulse::Rectangular,
        }
    }

    pub fn with_pulse(mut self, pulse: Pulse) -> Self {
        self.pulse = pulse;
        self
    }

    /// Cyclic frequency `α = 1/T` exploited by the estimators.
    pub fn cyclic_frequency(&self) -> f64 {
        1.0 / self.symbol_period
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.symbol_period > 0.0) || !self.symbol_period.is_finite() {
            return Err(Error::InvalidSignal(format!(
                "symbol period must be positive, got {}",
                self.symbol_period
            )));
        }
        constellation(self.modulation_order)?;
        if let Pulse::RaisedCosine { rolloff } = self.pulse {
            if !(0.0..=1.0).contains(&rolloff) {
                return Err(Error::InvalidSignal(format!(
                    "rolloff must lie in [0, 1], got {rolloff}"
                )));
            }
        }
        if self.kind == SignalKind::Ofdm {
            if self.num_subcarriers < 1 {
                return Err(Error::InvalidSignal("OFDM needs at least one subcarrier".into()));
            }
            if !(self.subcarrier_spacing > 0.0) {
                return Err(Error::InvalidSignal(format!(
                    "subcarrier spacing must be positive, got {}",
                    self.subcarrier_spacing
                )));
            }
            if self.cp_duration < 0.0 || self.cp_duration >= self.symbol_period {
                return Err(Error::InvalidSignal(format!(
                    "cyclic prefix {} must lie in [0, symbol period {})",
                    self.cp_duration, self.symbol_period
                )));
            }
            let expected = 1.0 / self.subcarrier_spacing + self.cp_duration;
            if (expected - self.symbol_period).abs() > 1e-9 * self.symbol_period {
                return Err(Error::InvalidSignal(format!(
                    "OFDM symbol period {} != 1/Δf + T_cp = {}",
                    self.symbol_period, expected
                )));
            }
        }
        Ok(())
    }

    /// The normalized pulse/window for this spec.
    pub fn shape(&self) -> Result<PulseShape> {
        self.validate()?;
        Ok(PulseShape::new(self.kind, self.pulse))
    }

    /// Subcarrier indices `κ` (a single zero for single-carrier signals).
    pub fn subcarrier_indices(&self) -> std::ops::Range<i64> {
        match self.kind {
            SignalKind::SingleCarrier => 0..1,
            SignalKind::Ofdm => {
                let nc = self.num_subcarriers as i64;
                let lo = -(nc / 2);
                lo..lo + nc
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum ShapeKind {
    Rect,
    Nyquist(f64),
    Taper(f64),
}

/// A pulse/window in symbol-period units with power-normalizing amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseShape {
    kind: ShapeKind,
    amplitude: f64,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

fn raised_cosine(t: f64, beta: f64) -> f64 {
    let d = 2.0 * beta * t;
    if beta > 0.0 && (d.abs() - 1.0).abs() < 1e-9 {
        PI / 4.0 * sinc(1.0 / (2.0 * beta))
    } else {
        sinc(t) * (PI * beta * t).cos() / (1.0 - d * d)
    }
}

impl PulseShape {
    fn new(signal: SignalKind, pulse: Pulse) -> Self {
        let kind = match (signal, pulse) {
            (_, Pulse::Rectangular) => ShapeKind::Rect,
            (SignalKind::SingleCarrier, Pulse::RaisedCosine { rolloff }) => ShapeKind::Nyquist(rolloff),
            (SignalKind::Ofdm, Pulse::RaisedCosine { rolloff }) if rolloff > 0.0 => ShapeKind::Taper(rolloff),
            (SignalKind::Ofdm, Pulse::RaisedCosine { .. }) => ShapeKind::Rect,
        };
        let mut shape = PulseShape { kind, amplitude: 1.0 };
        if kind != ShapeKind::Rect {
            shape.amplitude = 1.0 / shape.cached_energy().sqrt();
        }
        shape
    }

    /// `true` for shapes whose support is a single symbol period.
    pub fn is_rectangular(&self) -> bool {
        self.kind == ShapeKind::Rect
    }

    /// Support `[lo, hi)` in symbol periods.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            ShapeKind::Rect => (0.0, 1.0),
            ShapeKind::Nyquist(_) => (-RAISED_COSINE_SPAN, RAISED_COSINE_SPAN),
            ShapeKind::Taper(b) => (-b / 2.0, 1.0 + b / 2.0),
        }
    }

    fn raw(&self, tau: f64) -> f64 {
        match self.kind {
            ShapeKind::Rect => {
                if (-EDGE_EPS..1.0 - EDGE_EPS).contains(&tau) {
                    1.0
                } else {
                    0.0
                }
            }
            ShapeKind::Nyquist(b) => {
                if tau.abs() <= RAISED_COSINE_SPAN {
                    raised_cosine(tau, b)
                } else {
                    0.0
                }
            }
            ShapeKind::Taper(b) => {
                let h = b / 2.0;
                if tau < -h - EDGE_EPS || tau >= 1.0 + h - EDGE_EPS {
                    0.0
                } else if tau < h {
                    (PI * (tau + h) / (2.0 * b)).sin().powi(2)
                } else if tau < 1.0 - h {
                    1.0
                } else {
                    (PI * (tau - 1.0 + h) / (2.0 * b)).cos().powi(2)
                }
            }
        }
    }

    fn cached_energy(&self) -> f64 {
        static CACHE: OnceLock<Mutex<HashMap<(u8, u64), f64>>> = OnceLock::new();
        let key = match self.kind {
            ShapeKind::Rect => (0, 0),
            ShapeKind::Nyquist(b) => (1, b.to_bits()),
            ShapeKind::Taper(b) => (2, b.to_bits()),
        };
        let cache = CACHE.get_or_init(Default::default);
        if let Some(&e) = cache.lock().unwrap().get(&key) {
            return e;
        }
        let e = self.raw_energy();
        cache.lock().unwrap().insert(key, e);
        e
    }

    /// `∫ g_raw(τ)² dτ` over the support (composite Simpson rule).
    fn raw_energy(&self) -> f64 {
        let (lo, hi) = self.support();
        let n = 40_000;
        let h = (hi - lo) / n as f64;
        let f = |t: f64| self.raw(t).powi(2);
        let mut acc = f(lo) + f(hi - 1e-12);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(lo + i as f64 * h);
        }
        acc * h / 3.0
    }

    /// Normalized pulse value at `tau` symbol periods after the symbol start.
    pub fn value(&self, tau: f64) -> f64 {
        self.amplitude * self.raw(tau)
    }

    /// Symbols `l` whose pulse is nonzero at position `u` (in symbol periods),
    /// together with `g(u - l)`.
    pub fn active(&self, u: f64) -> impl Iterator<Item = (i64, f64)> + '_ {
        let (lo, hi) = self.support();
        let first = (u - hi).floor() as i64;
        let last = (u - lo).floor() as i64 + 1;
        (first..=last).filter_map(move |l| {
            let g = self.value(u - l as f64);
            (g != 0.0).then_some((l, g))
        })
    }

    /// Range of symbol indices touching samples `0..n_samples` when there are
    /// `samples_per_symbol` samples per period.
    pub fn symbol_span(&self, n_samples: usize, samples_per_symbol: f64) -> (i64, i64) {
        let (lo, hi) = self.support();
        let last_u = (n_samples.saturating_sub(1)) as f64 / samples_per_symbol;
        ((-hi).floor() as i64 - 1, (last_u - lo).floor() as i64 + 1)
    }

    /// Fourier-series coefficient of `Σ_l g(t - l)²` at `harmonic` cycles per
    /// symbol period.
    pub fn squared_line(&self, harmonic: f64) -> Complex {
        if self.kind == ShapeKind::Rect {
            // ∫₀¹ e^{-j2πht} dt
            let x = PI * harmonic;
            return Complex::from_polar(sinc(harmonic), -x);
        }
        let (lo, hi) = self.support();
        let n = 40_000;
        let h = (hi - lo) / n as f64;
        let f = |t: f64| self.value(t).powi(2) * Complex::from_polar(1.0, -2.0 * PI * harmonic * t);
        let mut acc = f(lo) + f(hi - 1e-12);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += f(lo + i as f64 * h) * w;
        }
        acc * (h / 3.0)
    }
}

/// Unit-average-power square QAM (BPSK for order 2).
pub fn constellation(order: u32) -> Result<Vec<Complex>> {
    let side = match order {
        2 => return Ok(vec![Complex::new(-1.0, 0.0), Complex::new(1.0, 0.0)]),
        4 => 2,
        16 => 4,
        64 => 8,
        _ => return Err(Error::UnsupportedModulation(order)),
    };
    let levels: Vec<f64> = (0..side).map(|i| (2 * i - (side - 1)) as f64).collect();
    let mut pts: Vec<Complex> = levels
        .iter()
        .flat_map(|&i| levels.iter().map(move |&q| Complex::new(i, q)))
        .collect();
    let power = pts.iter().map(|p| p.norm_sqr()).sum::<f64>() / pts.len() as f64;
    let scale = power.sqrt().recip();
    pts.iter_mut().for_each(|p| *p *= scale);
    Ok(pts)
}

/// Low-order moments of a constellation with equiprobable points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolMoments {
    /// `E[|a|²]`
    pub power: f64,
    /// `E[a²]`
    pub pseudo: Complex,
    /// `E[|a|⁴]`
    pub fourth: f64,
}

impl SymbolMoments {
    pub fn of_order(order: u32) -> Result<Self> {
        let pts = constellation(order)?;
        let n = pts.len() as f64;
        Ok(SymbolMoments {
            power: pts.iter().map(|p| p.norm_sqr()).sum::<f64>() / n,
            pseudo: pts.iter().map(|p| p * p).sum::<Complex>() / n,
            fourth: pts.iter().map(|p| p.norm_sqr().powi(2)).sum::<f64>() / n,
        })
    }

    pub fn scaled(&self, amplitude: f64) -> Self {
        let a2 = amplitude * amplitude;
        SymbolMoments {
            power: self.power * a2,
            pseudo: self.pseudo * a2,
            fourth: self.fourth * a2 * a2,
        }
    }
}

/// Draws `count` i.i.d. symbols uniformly from the order-`order` constellation.
pub fn gen_symbols<R: Rng + ?Sized>(order: u32, count: usize, rng: &mut R) -> Result<Vec<Complex>> {
    let pts = constellation(order)?;
    Ok((0..count).map(|_| pts[rng.random_range(0..pts.len())]).collect())
}

/// Complex samples on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBuffer {
    pub samples: Vec<Complex>,
    pub sample_rate: f64,
}

impl SampleBuffer {
    pub fn new(samples: Vec<Complex>, sample_rate: f64) -> Self {
        SampleBuffer { samples, sample_rate }
    }

    pub fn zeros(len: usize, sample_rate: f64) -> Self {
        SampleBuffer::new(vec![Complex::new(0.0, 0.0); len], sample_rate)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_period(&self) -> f64 {
        1.0 / self.sample_rate
    }

    /// Empirical average power `mean |s(n)|²`.
    pub fn power(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.len().max(1) as f64
    }

    pub fn mean(&self) -> Complex {
        self.samples.iter().sum::<Complex>() / self.len().max(1) as f64
    }

    /// Drops the first `n` samples.
    pub fn skip(mut self, n: usize) -> Self {
        self.samples.drain(..n.min(self.samples.len()));
        self
    }
}

fn check_rate(spec: &SignalSpec, n_samples: usize, fs: f64) -> Result<()> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be positive".into()));
    }
    if !(fs > spec.cyclic_frequency()) {
        return Err(Error::InvalidArgument(format!(
            "sample rate {fs} must exceed the cyclic frequency {}",
            spec.cyclic_frequency()
        )));
    }
    Ok(())
}

fn carrier(freq: f64, n: usize, fs: f64) -> Complex {
    if freq == 0.0 {
        Complex::new(1.0, 0.0)
    } else {
        // Reduce the phase in cycles first; f * n / fs is large for RF carriers.
        let cycles = (freq / fs * n as f64).fract();
        Complex::from_polar(1.0, 2.0 * PI * cycles)
    }
}

/// Single-carrier stream `Σ_l a_l g(nT_s - lT) e^{j2π f nT_s}`.
pub fn gen_single_carrier<R: Rng + ?Sized>(
    spec: &SignalSpec,
    n_samples: usize,
    fs: f64,
    rng: &mut R,
) -> Result<SampleBuffer> {
    if spec.kind != SignalKind::SingleCarrier {
        return Err(Error::InvalidSignal("expected a single-carrier spec".into()));
    }
    let shape = spec.shape()?;
    check_rate(spec, n_samples, fs)?;
    let sps = spec.symbol_period * fs;
    let (l0, l1) = shape.symbol_span(n_samples, sps);
    let symbols = gen_symbols(spec.modulation_order, (l1 - l0 + 1) as usize, rng)?;
    let samples = (0..n_samples)
        .map(|n| {
            let u = n as f64 / sps;
            let base: Complex = shape
                .active(u)
                .map(|(l, g)| symbols[(l - l0) as usize] * g)
                .sum();
            base * carrier(spec.carrier_freq, n, fs)
        })
        .collect();
    Ok(SampleBuffer::new(samples, fs))
}

/// Position of sample `n` within the subcarrier period `1/Δf`, in cycles.
///
/// When `fs/Δf` is an integer the reduction is done in integer arithmetic so
/// that samples exactly one useful period apart (cyclic prefix and its source)
/// share bit-identical phasors.
pub(crate) fn subcarrier_cycle(n: usize, spacing: f64, fs: f64) -> f64 {
    let per = fs / spacing;
    let rounded = per.round();
    if rounded >= 1.0 && (per - rounded).abs() < 1e-9 * per {
        let p = rounded as usize;
        (n % p) as f64 / p as f64
    } else {
        (n as f64 * spacing / fs).fract()
    }
}

/// OFDM stream with cyclic prefix, `N_c` subcarriers spaced by `Δf`.
pub fn gen_ofdm<R: Rng + ?Sized>(
    spec: &SignalSpec,
    n_samples: usize,
    fs: f64,
    rng: &mut R,
) -> Result<SampleBuffer> {
    if spec.kind != SignalKind::Ofdm {
        return Err(Error::InvalidSignal("expected an OFDM spec".into()));
    }
    let shape = spec.shape()?;
    check_rate(spec, n_samples, fs)?;
    let nc = spec.num_subcarriers;
    let kappas = spec.subcarrier_indices();
    let sps = spec.symbol_period * fs;
    let (l0, l1) = shape.symbol_span(n_samples, sps);
    let n_sym = (l1 - l0 + 1) as usize;
    let amp = (nc as f64).sqrt().recip();
    let data: Vec<Vec<Complex>> = (0..n_sym)
        .map(|_| {
            gen_symbols(spec.modulation_order, nc, rng).map(|v| v.into_iter().map(|c| c * amp).collect())
        })
        .collect::<Result<_>>()?;

    let mut phasors = vec![Complex::new(0.0, 0.0); nc];
    let samples = (0..n_samples)
        .map(|n| {
            let cyc = subcarrier_cycle(n, spec.subcarrier_spacing, fs);
            for (p, k) in phasors.iter_mut().zip(kappas.clone()) {
                *p = Complex::from_polar(1.0, 2.0 * PI * (k as f64 * cyc).fract());
            }
            let u = n as f64 / sps;
            let base: Complex = shape
                .active(u)
                .map(|(l, g)| {
                    let sym = &data[(l - l0) as usize];
                    sym.iter().zip(&phasors).map(|(c, p)| c * p).sum::<Complex>() * g
                })
                .sum();
            base * carrier(spec.carrier_freq, n, fs)
        })
        .collect();
    Ok(SampleBuffer::new(samples, fs))
}

/// Dispatches on the spec kind.
pub fn generate<R: Rng + ?Sized>(spec: &SignalSpec, n_samples: usize, fs: f64, rng: &mut R) -> Result<SampleBuffer> {
    match spec.kind {
        SignalKind::SingleCarrier => gen_single_carrier(spec, n_samples, fs, rng),
        SignalKind::Ofdm => gen_ofdm(spec, n_samples, fs, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn qpsk() -> SignalSpec {
        SignalSpec::single_carrier(4, 20e6, 0.0)
    }

    #[test]
    fn single_qpsk_symbol_is_on_the_constellation() {
        let s = gen_symbols(4, 1, &mut seeded(3)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s[0].re.abs() - r).abs() < 1e-15 && (s[0].im.abs() - r).abs() < 1e-15);
    }

    #[test]
    fn qpsk_symbols_have_unit_power_and_zero_mean() {
        let s = gen_symbols(4, 100_000, &mut seeded(11)).unwrap();
        let p = s.iter().map(|a| a.norm_sqr()).sum::<f64>() / s.len() as f64;
        let m = s.iter().sum::<Complex>() / s.len() as f64;
        assert!((p - 1.0).abs() < 0.01);
        assert!(m.norm() < 0.02);
    }

    #[test]
    fn sixteen_qam_fourth_moment() {
        // Enumerate the 16 points of the unit-power grid {±1, ±3}/√10.
        let levels = [-3.0f64, -1.0, 1.0, 3.0];
        let mut exact = 0.0;
        for i in levels {
            for q in levels {
                exact += ((i * i + q * q) / 10.0).powi(2);
            }
        }
        exact /= 16.0;
        assert!((exact - 1.32).abs() < 1e-12);

        let s = gen_symbols(16, 100_000, &mut seeded(5)).unwrap();
        let m4 = s.iter().map(|a| a.norm_sqr().powi(2)).sum::<f64>() / s.len() as f64;
        assert!((m4 / exact - 1.0).abs() < 0.02, "{m4}");
        assert!((SymbolMoments::of_order(16).unwrap().fourth - exact).abs() < 1e-12);
    }

    #[test]
    fn unsupported_order_is_rejected() {
        assert!(matches!(gen_symbols(8, 1, &mut seeded(0)), Err(Error::UnsupportedModulation(8))));
    }

    #[test]
    fn rectangular_single_symbol_repeats() {
        let spec = qpsk().with_pulse(Pulse::Rectangular);
        let fs = 4.0 / spec.symbol_period;
        let buf = gen_single_carrier(&spec, 4, fs, &mut seeded(9)).unwrap();
        let first = buf.samples[0];
        assert!(buf.samples.iter().all(|&s| s == first));
        assert!((first.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_carrier_power_is_normalized() {
        let buf = gen_single_carrier(&qpsk(), 400_000, 200e6, &mut seeded(1)).unwrap();
        assert!((buf.power() - 1.0).abs() < 0.01, "{}", buf.power());
        assert!(buf.mean().norm() < 0.01);
    }

    #[test]
    fn single_carrier_rejects_bad_inputs() {
        let spec = qpsk();
        assert!(gen_single_carrier(&spec, 0, 200e6, &mut seeded(1)).is_err());
        assert!(gen_single_carrier(&spec, 10, 10e6, &mut seeded(1)).is_err());
        let ofdm = SignalSpec::ofdm(4, 64, 312.5e3, 0.8e-6, 0.0);
        assert!(gen_single_carrier(&ofdm, 10, 1e6, &mut seeded(1)).is_err());
    }

    #[test]
    fn wlan_and_lte_cyclic_frequencies() {
        let wlan = SignalSpec::ofdm(4, 64, 312.5e3, 0.8e-6, 0.0);
        assert!((wlan.symbol_period - 4e-6).abs() < 1e-15);
        assert!((wlan.cyclic_frequency() - 250e3).abs() < 1e-6);
        let lte = SignalSpec::ofdm(4, 1024, 15e3, 4.7e-6, 0.0);
        assert!((lte.cyclic_frequency() - 14e3).abs() < 50.0, "{}", lte.cyclic_frequency());
    }

    #[test]
    fn ofdm_prefix_copies_symbol_tail() {
        let spec = SignalSpec::ofdm(4, 64, 312.5e3, 0.8e-6, 0.0);
        let fs = 20e6;
        let buf = gen_ofdm(&spec, 240, fs, &mut seeded(4)).unwrap();
        let (n_sym, n_fft, n_cp) = (80, 64, 16);
        for l in 0..3 {
            for i in 0..n_cp {
                let a = buf.samples[l * n_sym + i];
                let b = buf.samples[l * n_sym + i + n_fft];
                assert_eq!(a, b, "symbol {l}, offset {i}");
            }
        }
    }

    #[test]
    fn ofdm_power_is_normalized() {
        let spec = SignalSpec::ofdm(4, 64, 312.5e3, 0.8e-6, 0.0);
        let buf = gen_ofdm(&spec, 20_000, 20e6, &mut seeded(8)).unwrap();
        assert!((buf.power() - 1.0).abs() < 0.01, "{}", buf.power());
        let tapered = spec.clone().with_pulse(Pulse::RaisedCosine { rolloff: 0.25 });
        let buf = gen_ofdm(&tapered, 20_000, 20e6, &mut seeded(8)).unwrap();
        assert!((buf.power() - 1.0).abs() < 0.01, "{}", buf.power());
    }

    #[test]
    fn ofdm_rejects_invalid_specs() {
        let mut spec = SignalSpec::ofdm(4, 64, 312.5e3, 0.8e-6, 0.0);
        spec.cp_duration = spec.symbol_period;
        assert!(spec.validate().is_err());
        let mut spec = SignalSpec::ofdm(4, 64, 312.5e3, 0.8e-6, 0.0);
        spec.num_subcarriers = 0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn shapes_have_unit_energy_per_period() {
        for (kind, pulse) in [
            (SignalKind::SingleCarrier, Pulse::RaisedCosine { rolloff: 1.0 }),
            (SignalKind::SingleCarrier, Pulse::RaisedCosine { rolloff: 0.35 }),
            (SignalKind::Ofdm, Pulse::RaisedCosine { rolloff: 0.5 }),
        ] {
            let shape = PulseShape::new(kind, pulse);
            assert!((shape.squared_line(0.0).re - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn full_rolloff_squared_envelope_line() {
        // For β = 1 the first line of Σ g² is 1/8 of the raw pulse while the
        // mean power is 3/4, i.e. 1/6 after normalization.
        let shape = PulseShape::new(SignalKind::SingleCarrier, Pulse::RaisedCosine { rolloff: 1.0 });
        let line = shape.squared_line(1.0);
        assert!((line.norm() - 1.0 / 6.0).abs() < 2e-3, "{}", line.norm());
    }
}
