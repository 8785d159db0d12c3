//! Shot noise X(t) = x₀e^{−αt} + Σ_{τₖ ≤ t} Jₖ e^{−α(t−τₖ)} driven by a
//! homogeneous Poisson stream: closed-form moments, characteristic function,
//! infinitesimal moments, and exact event-driven simulation.

use std::io::Write;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::distributions::JumpFamily;
use crate::error::{invalid, Error, Result};
use crate::quad;
use crate::real::{fmt_f64, Real};
use crate::rng::RngStream;
use crate::sampling::{EventSource, Resolution};

/// Largest expected number of events a single path may generate.
pub const MAX_PATH_EVENTS: f64 = 1e8;

/// Lookback beyond which an event's contribution has decayed by 2⁻⁵³,
/// i.e. below double-precision resolution of the current value.
pub fn memory_window(alpha: f64) -> f64 {
    53.0 * std::f64::consts::LN_2 / alpha
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotNoiseParams<T> {
    /// Event rate λ (events per unit time).
    pub lambda: T,
    /// Decay rate α (per unit time).
    pub alpha: T,
    pub x0: T,
    pub jump: JumpFamily<T>,
}

impl<T: Real> ShotNoiseParams<T> {
    pub fn new(lambda: T, alpha: T, x0: T, jump: JumpFamily<T>) -> Result<Self> {
        let p = Self { lambda, alpha, x0, jump };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > T::zero() && self.lambda.is_finite()) {
            return Err(invalid(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.alpha > T::zero() && self.alpha.is_finite()) {
            return Err(invalid(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.x0 >= T::zero() && self.x0.is_finite()) {
            return Err(invalid(format!("x0 must be nonnegative, got {}", self.x0)));
        }
        self.jump.validate()
    }
}

/// Two independent streams: jumps from `pos` at rate `lambda_pos` and the
/// constant `neg_value` at rate `lambda_neg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinParams<T> {
    pub pos: JumpFamily<T>,
    pub neg_value: T,
    pub lambda_pos: T,
    pub lambda_neg: T,
    pub alpha: T,
    pub x0: T,
}

impl<T: Real> SteinParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !self.pos.is_nonnegative() {
            return Err(invalid("positive stream needs a nonnegative family"));
        }
        if !(self.neg_value <= T::zero()) {
            return Err(invalid("neg_value must be <= 0"));
        }
        if !(self.lambda_pos > T::zero()) || !(self.lambda_neg >= T::zero()) {
            return Err(invalid("lambda_pos must be positive and lambda_neg nonnegative"));
        }
        ShotNoiseParams::new(self.lambda_pos, self.alpha, self.x0, self.pos.clone()).map(|_| ())
    }

    /// Splits a Mixture-driven shot noise into its two streams.
    pub fn from_mixture(params: &ShotNoiseParams<T>) -> Result<Self> {
        match &params.jump {
            JumpFamily::Mixture { pos, neg_value, neg_prob } => Ok(Self {
                pos: (**pos).clone(),
                neg_value: *neg_value,
                lambda_pos: params.lambda * (T::one() - *neg_prob),
                lambda_neg: params.lambda * *neg_prob,
                alpha: params.alpha,
                x0: params.x0,
            }),
            other => Err(invalid(format!("expected a mixture family, got {}", other.tag()))),
        }
    }

    /// Equivalent single-stream parameters with λ = λ⁺ + λ⁻.
    pub fn to_mixture(&self) -> Result<ShotNoiseParams<T>> {
        let lambda = self.lambda_pos + self.lambda_neg;
        let jump = JumpFamily::mixture(self.pos.clone(), self.neg_value, self.lambda_neg / lambda)?;
        ShotNoiseParams::new(lambda, self.alpha, self.x0, jump)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotMoments<T> {
    pub mean: T,
    pub variance: T,
    /// Cov(X(t), X(t+s)).
    pub covariance: T,
    pub fourth_moment: T,
}

/// Mean, variance, lag-`s` covariance and fourth raw moment of X(t).
pub fn shot_moments<T: Real>(params: &ShotNoiseParams<T>, t: T, s: T) -> ShotMoments<T> {
    let (lambda, alpha, x0) = (params.lambda, params.alpha, params.x0);
    let j = &params.jump;
    // 1 − e^{−kαt}
    let decay = |k: f64| -(-(T::lit(k) * alpha * t)).exp_m1();
    let mean = lambda / alpha * j.moment(1) * decay(1.0) + x0 * (-alpha * t).exp();
    let variance = lambda / (T::lit(2.0) * alpha) * j.moment(2) * decay(2.0);
    let covariance = (-alpha * s).exp() * variance;
    let k3 = T::lit(4.0) * lambda / (T::lit(3.0) * alpha) * mean * j.moment(3) * decay(3.0);
    let k4 = lambda / (T::lit(4.0) * alpha) * j.moment(4) * decay(4.0);
    let m2 = mean * mean;
    let fourth_moment = m2 * m2 + T::lit(6.0) * m2 * variance + T::lit(3.0) * variance * variance + k3 + k4;
    ShotMoments { mean, variance, covariance, fourth_moment }
}

/// Characteristic function E[e^{iuX(t)}].
///
/// The time integral is taken in v = e^{−αy}:
/// (λ/α)∫_{e^{−αt}}^{1} (φ_J(uv) − 1)/v dv, where φ_J − 1 is the closed form
/// from [`JumpFamily::char_fn_minus_one`]. `t` may be infinite.
pub fn shot_char_fn<T: Real>(params: &ShotNoiseParams<T>, t: T, u: T) -> Result<Complex<T>> {
    if u == T::zero() {
        return Ok(Complex::new(T::one(), T::zero()));
    }
    let scale = params.lambda / params.alpha;
    let lower = (-params.alpha * t).exp();
    let abs_tol = T::lit(1e-10) / scale.max(T::one());
    let jump = &params.jump;
    let mut failure = None;
    let q = quad::integrate(
        |v: T| match jump.char_fn_minus_one(u * v) {
            Ok(c) => c / v,
            Err(e) => {
                failure.get_or_insert(e);
                Complex::new(T::zero(), T::zero())
            }
        },
        lower,
        T::one(),
        abs_tol,
        T::lit(1e-12),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let mut exponent = q.value * scale;
    exponent.im = exponent.im + u * params.x0 * lower;
    // roundoff can push a vanishing real part slightly above zero
    if exponent.re > T::zero() && exponent.re < T::lit(1e-9) {
        exponent.re = T::zero();
    }
    Ok(exponent.exp())
}

/// Infinitesimal moments of X: M₁(x) = −αx + λE[J], M₂ = λE[J²], M₄ = λE[J⁴].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfinitesimalMoments<T> {
    pub alpha: T,
    /// λE[J], the intercept of M₁.
    pub drift: T,
    pub m2: T,
    pub m4: T,
}

impl<T: Real> InfinitesimalMoments<T> {
    pub fn m1(&self, x: T) -> T {
        -self.alpha * x + self.drift
    }
}

pub fn infinitesimal_moments<T: Real>(params: &ShotNoiseParams<T>) -> InfinitesimalMoments<T> {
    InfinitesimalMoments {
        alpha: params.alpha,
        drift: params.lambda * params.jump.moment(1),
        m2: params.lambda * params.jump.moment(2),
        m4: params.lambda * params.jump.moment(4),
    }
}

/// Values of one simulated path on a time grid, with the events behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub grid_times: Vec<f64>,
    pub values: Vec<f64>,
    pub event_times: Option<Vec<f64>>,
    pub event_amplitudes: Option<Vec<f64>>,
    pub seed: u64,
    pub stream_id: u64,
}

impl SamplePath {
    /// CSV with columns `time,value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Unsupported(format!("csv output failed: {e}"));
        w.write_record(["time", "value"]).map_err(io)?;
        for (t, v) in self.grid_times.iter().zip(&self.values) {
            w.write_record([fmt_f64(*t), fmt_f64(*v)]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Unsupported(format!("csv output failed: {e}")))
    }

    /// Sidecar CSV with columns `time,amplitude`; empty if events were not kept.
    pub fn write_events_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Unsupported(format!("csv output failed: {e}"));
        w.write_record(["time", "amplitude"]).map_err(io)?;
        if let (Some(ts), Some(js)) = (&self.event_times, &self.event_amplitudes) {
            for (t, j) in ts.iter().zip(js) {
                w.write_record([fmt_f64(*t), fmt_f64(*j)]).map_err(io)?;
            }
        }
        w.flush().map_err(|e| Error::Unsupported(format!("csv output failed: {e}")))
    }
}

/// Superposition of independent Poisson event streams.
#[derive(Debug, Clone)]
pub struct EventStreams {
    rates: Vec<f64>,
    sources: Vec<EventSource>,
    total_rate: f64,
}

impl EventStreams {
    /// Builds the superposition from `(base rate, jump law)` pairs.
    pub fn new(streams: &[(f64, &JumpFamily<f64>)], resolution: Resolution) -> Result<Self> {
        let mut rates = Vec::new();
        let mut sources = Vec::new();
        for &(rate, fam) in streams {
            let src = EventSource::new(fam, resolution)?;
            let r = rate * src.rate_factor;
            if r > 0.0 {
                rates.push(r);
                sources.push(src);
            }
        }
        let total_rate = rates.iter().sum();
        Ok(Self { rates, sources, total_rate })
    }

    /// Rate of generated (candidate) events.
    pub fn total_rate(&self) -> f64 {
        self.total_rate
    }

    #[inline]
    fn pick(&self, rng: &mut RngStream) -> Option<f64> {
        if self.sources.len() == 1 {
            return self.sources[0].draw(rng);
        }
        let mut u = rng.open01() * self.total_rate;
        for (r, s) in self.rates.iter().zip(&self.sources) {
            if u < *r {
                return s.draw(rng);
            }
            u -= r;
        }
        self.sources.last().and_then(|s| s.draw(rng))
    }

    /// Appends the events of `(start, end]` in time order.
    pub fn generate(&self, start: f64, end: f64, rng: &mut RngStream, times: &mut Vec<f64>, amps: &mut Vec<f64>) {
        if self.total_rate <= 0.0 {
            return;
        }
        let mut t = start;
        loop {
            t += rng.exp1() / self.total_rate;
            if t > end {
                break;
            }
            if let Some(j) = self.pick(rng) {
                times.push(t);
                amps.push(j);
            }
        }
    }
}

/// Reads a path off its event list: starting from `value_start` at
/// `t_start`, the value decays as e^{−αΔ} between events and jumps by the
/// amplitude at each event. An event at exactly a grid time is included.
pub fn read_out(value_start: f64, t_start: f64, alpha: f64, times: &[f64], amps: &[f64], grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    let mut value = value_start;
    let mut now = t_start;
    let mut k = 0;
    for &g in grid {
        while k < times.len() && times[k] <= g {
            value = value * (-alpha * (times[k] - now)).exp() + amps[k];
            now = times[k];
            k += 1;
        }
        out.push(value * (-alpha * (g - now)).exp());
    }
    out
}

fn check_grid(grid: &[f64], horizon: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid("time grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("time grid must be strictly increasing"));
    }
    if !(grid[0] >= 0.0) || !(grid[grid.len() - 1] <= horizon) {
        return Err(invalid(format!("time grid must lie in [0, {horizon}]")));
    }
    Ok(())
}

fn guard(expected: f64) -> Result<()> {
    if expected > MAX_PATH_EVENTS {
        return Err(Error::ResourceGuard(format!(
            "about {expected:.3e} events expected (limit {MAX_PATH_EVENTS:.0e}); \
             use shot_moments or shot_char_fn instead"
        )));
    }
    Ok(())
}

fn simulate_streams(
    streams: &EventStreams,
    alpha: f64,
    x0: f64,
    horizon: f64,
    grid: &[f64],
    rng: &mut RngStream,
) -> Result<SamplePath> {
    check_grid(grid, horizon)?;
    guard(streams.total_rate() * horizon)?;
    let mut times = Vec::new();
    let mut amps = Vec::new();
    streams.generate(0.0, horizon, rng, &mut times, &mut amps);
    let values = read_out(x0, 0.0, alpha, &times, &amps, grid);
    Ok(SamplePath {
        grid_times: grid.to_vec(),
        values,
        event_times: Some(times),
        event_amplitudes: Some(amps),
        seed: rng.seed(),
        stream_id: rng.stream_id(),
    })
}

/// Exact path on `[0, horizon]` read off at `grid`.
///
/// Zero-valued jumps are thinned exactly, so the recorded event list holds
/// only events that move the path.
pub fn simulate_path(
    params: &ShotNoiseParams<f64>,
    horizon: f64,
    grid: &[f64],
    rng: &mut RngStream,
) -> Result<SamplePath> {
    params.validate()?;
    let streams = EventStreams::new(&[(params.lambda, &params.jump)], Resolution::Exact)?;
    simulate_streams(&streams, params.alpha, params.x0, horizon, grid, rng)
}

/// Exact path of the two-stream process: `pos` jumps at rate `lambda_pos`
/// plus the constant `neg_value` at rate `lambda_neg`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_stein_path(
    pos: &JumpFamily<f64>,
    neg_value: f64,
    lambda_pos: f64,
    lambda_neg: f64,
    alpha: f64,
    x0: f64,
    grid: &[f64],
    rng: &mut RngStream,
) -> Result<SamplePath> {
    let params = SteinParams { pos: pos.clone(), neg_value, lambda_pos, lambda_neg, alpha, x0 };
    params.validate()?;
    let neg = JumpFamily::Degenerate { j: neg_value };
    let streams = EventStreams::new(&[(lambda_pos, pos), (lambda_neg, &neg)], Resolution::Exact)?;
    let horizon = grid.last().copied().unwrap_or(0.0);
    simulate_streams(&streams, alpha, x0, horizon, grid, rng)
}

/// Sampler of X(t) for ensembles.
///
/// Only events within [`memory_window`] of the read-out time are generated;
/// older ones have decayed below double precision. The marginal at a single
/// time is drawn in reverse time (lookback s = t − τ is again a Poisson
/// stream), which needs no event storage.
#[derive(Debug, Clone)]
pub struct ShotSampler {
    streams: EventStreams,
    alpha: f64,
    x0: f64,
    window: f64,
}

impl ShotSampler {
    pub fn new(params: &ShotNoiseParams<f64>, resolution: Resolution) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            streams: EventStreams::new(&[(params.lambda, &params.jump)], resolution)?,
            alpha: params.alpha,
            x0: params.x0,
            window: memory_window(params.alpha),
        })
    }

    pub fn stein(params: &SteinParams<f64>, resolution: Resolution) -> Result<Self> {
        params.validate()?;
        let neg = JumpFamily::Degenerate { j: params.neg_value };
        Ok(Self {
            streams: EventStreams::new(
                &[(params.lambda_pos, &params.pos), (params.lambda_neg, &neg)],
                resolution,
            )?,
            alpha: params.alpha,
            x0: params.x0,
            window: memory_window(params.alpha),
        })
    }

    /// Overrides the lookback window (default: [`memory_window`]).
    pub fn with_window(mut self, window: f64) -> Self {
        self.window = window;
        self
    }

    /// Expected number of generated events per sample read at `t`.
    pub fn expected_events(&self, t: f64) -> f64 {
        self.streams.total_rate() * t.min(self.window)
    }

    /// Expected events per sample for a grid read-out.
    pub fn expected_events_grid(&self, grid: &[f64]) -> f64 {
        let (first, last) = (grid[0], grid[grid.len() - 1]);
        self.streams.total_rate() * (last - (first - self.window).max(0.0))
    }

    pub fn sample_at(&self, t: f64, rng: &mut RngStream) -> f64 {
        let span = t.min(self.window);
        let rate = self.streams.total_rate();
        let mut acc = 0.0;
        if rate > 0.0 {
            let mut s = 0.0;
            loop {
                s += rng.exp1() / rate;
                if s > span {
                    break;
                }
                if let Some(j) = self.streams.pick(rng) {
                    acc += j * (-self.alpha * s).exp();
                }
            }
        }
        self.x0 * (-self.alpha * t).exp() + acc
    }

    /// Joint read-out at increasing grid times, generating events forward
    /// from `max(0, grid[0] − window)`.
    pub fn sample_grid(&self, grid: &[f64], rng: &mut RngStream) -> Vec<f64> {
        let start = (grid[0] - self.window).max(0.0);
        let mut times = Vec::new();
        let mut amps = Vec::new();
        self.streams.generate(start, grid[grid.len() - 1], rng, &mut times, &mut amps);
        read_out(self.x0 * (-self.alpha * start).exp(), start, self.alpha, &times, &amps, grid)
    }
}
