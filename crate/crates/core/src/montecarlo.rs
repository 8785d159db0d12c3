//! Ensembles of process marginals, binned densities, integrated absolute
//! error and the shot-noise vs limit-process comparison grid.
//!
//! Sample `k` of an ensemble always draws from stream `k` of the ensemble
//! seed, so results do not depend on the number of worker threads.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::levyou::{GaussianOUParams, LevyOUParams, LevyOuSampler};
use crate::limits::{self, FamilySequence, Limit};
use crate::rng::{mix_seed, RngStream};
use crate::real::fmt_f64;
use crate::sampling::{Resolution, DEFAULT_RESOLUTION};
use crate::shotnoise::{ShotNoiseParams, ShotSampler, SteinParams};

/// Ensembles whose expected number of generated events exceeds this are
/// refused.
pub const MAX_ENSEMBLE_EVENTS: f64 = 2e11;

/// Process whose time-t marginal is sampled.
///
/// JSON form: `{"process": "shot", "lambda": 1000.0, "alpha": 1.0, "x0": 0.0,
/// "jump": {"family": "bernoulli", "p": 0.001}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "snake_case")]
pub enum ProcessSpec {
    Shot(ShotNoiseParams<f64>),
    /// Shot noise with an independent stream of constant negative jumps.
    Stein(SteinParams<f64>),
    LevyOu(LevyOUParams<f64>),
    GaussianOu(GaussianOUParams<f64>),
}

impl ProcessSpec {
    pub fn tag(&self) -> String {
        match self {
            Self::Shot(p) => format!("shot:{}", p.jump.tag()),
            Self::Stein(p) => format!("stein:{}", p.pos.tag()),
            Self::LevyOu(p) => format!("ou-{}", p.subordinator.label().to_ascii_lowercase()),
            Self::GaussianOu(_) => "gauss-ou".to_string(),
        }
    }
}

enum Sampler {
    Shot(ShotSampler),
    Levy(LevyOuSampler),
    Gauss(GaussianOUParams<f64>),
}

impl Sampler {
    fn new(spec: &ProcessSpec) -> Result<Self> {
        let floor = Resolution::Floor(DEFAULT_RESOLUTION);
        Ok(match spec {
            ProcessSpec::Shot(p) => Sampler::Shot(ShotSampler::new(p, floor)?),
            ProcessSpec::Stein(p) => Sampler::Shot(ShotSampler::stein(p, floor)?),
            ProcessSpec::LevyOu(p) => Sampler::Levy(LevyOuSampler::new(p)?),
            ProcessSpec::GaussianOu(p) => {
                p.validate()?;
                Sampler::Gauss(p.clone())
            }
        })
    }

    fn guard(&self, n: usize, events_per_sample: f64) -> Result<()> {
        let total = n as f64 * events_per_sample;
        if matches!(self, Sampler::Shot(_)) && total > MAX_ENSEMBLE_EVENTS {
            return Err(Error::ResourceGuard(format!(
                "{n} samples need about {total:.3e} events, above the limit of {MAX_ENSEMBLE_EVENTS:.1e}"
            )));
        }
        Ok(())
    }

    fn at(&self, t: f64, rng: &mut RngStream) -> f64 {
        match self {
            Sampler::Shot(s) => s.sample_at(t, rng),
            Sampler::Levy(s) => s.sample_at(t, rng),
            Sampler::Gauss(g) => g.mean(t) + g.variance(t).sqrt() * rng.std_normal(),
        }
    }

    fn grid(&self, grid: &[f64], rng: &mut RngStream) -> Vec<f64> {
        match self {
            Sampler::Shot(s) => s.sample_grid(grid, rng),
            Sampler::Levy(s) => s.sample_grid(grid, rng),
            Sampler::Gauss(g) => {
                let (mut now, mut y) = (0.0, g.y0);
                grid.iter()
                    .map(|&t| {
                        if t > now {
                            y = g.transition_sample(y, t - now, rng);
                            now = t;
                        }
                        y
                    })
                    .collect()
            }
        }
    }
}

fn in_pool<R: Send>(workers: usize, job: impl FnOnce() -> R + Send) -> Result<R> {
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(job))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub process_tag: String,
    pub t: f64,
    pub samples: Vec<f64>,
    pub seed: u64,
    pub n: usize,
}

/// `n` independent draws of the marginal at time `t`. `workers = 0` uses
/// the global thread pool.
pub fn run_ensemble(spec: &ProcessSpec, t: f64, n: usize, seed: u64, workers: usize) -> Result<EnsembleResult> {
    if n == 0 {
        return Err(invalid("ensemble size must be at least 1"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("time must be nonnegative, got {t}")));
    }
    let sampler = Sampler::new(spec)?;
    if let Sampler::Shot(s) = &sampler {
        sampler.guard(n, s.expected_events(t))?;
    }
    let samples = in_pool(workers, || {
        (0..n as u64)
            .into_par_iter()
            .map(|k| sampler.at(t, &mut RngStream::new(seed, k)))
            .collect::<Vec<f64>>()
    })?;
    Ok(EnsembleResult { process_tag: spec.tag(), t, samples, seed, n })
}

/// `n` independent paths read at the increasing times of `grid`; entry
/// `[k][i]` is path `k` at `grid[i]`.
pub fn run_path_ensemble(spec: &ProcessSpec, grid: &[f64], n: usize, seed: u64, workers: usize) -> Result<Vec<Vec<f64>>> {
    if n == 0 || grid.is_empty() {
        return Err(invalid("need at least one path and one grid time"));
    }
    if !(grid[0] >= 0.0) || !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(invalid("grid times must be nonnegative and strictly increasing"));
    }
    let sampler = Sampler::new(spec)?;
    if let Sampler::Shot(s) = &sampler {
        sampler.guard(n, s.expected_events_grid(grid))?;
    }
    in_pool(workers, || {
        (0..n as u64)
            .into_par_iter()
            .map(|k| sampler.grid(grid, &mut RngStream::new(seed, k)))
            .collect()
    })
}

/// Piecewise-constant density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub bin_edges: Vec<f64>,
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binning {
    Fixed(usize),
    /// Freedman–Diaconis bin count clamped to [64, 2048].
    Auto,
}

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < v.len() {
        v[i] + frac * (v[i + 1] - v[i])
    } else {
        v[i]
    }
}

fn uniform_edges(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let w = (hi - lo) / m as f64;
    let mut e: Vec<f64> = (0..m).map(|i| lo + w * i as f64).collect();
    e.push(hi);
    e
}

pub fn estimate_density(samples: &[f64], binning: Binning) -> Result<DensityEstimate> {
    if samples.is_empty() {
        return Err(invalid("density estimate needs samples"));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(invalid("samples must be finite"));
    }
    let v = sorted(samples);
    let (lo, hi) = (v[0], v[v.len() - 1]);
    if lo == hi {
        return Err(Error::Domain(format!("all samples equal {lo}; no bin width")));
    }
    let m = match binning {
        Binning::Fixed(m) if m > 0 => m,
        Binning::Fixed(_) => return Err(invalid("bin count must be positive")),
        Binning::Auto => {
            let iqr = quantile_sorted(&v, 0.75) - quantile_sorted(&v, 0.25);
            let h = 2.0 * iqr / (v.len() as f64).cbrt();
            if h > 0.0 {
                (((hi - lo) / h).ceil() as usize).clamp(64, 2048)
            } else {
                64
            }
        }
    };
    let edges = uniform_edges(lo, hi, m);
    let w = (hi - lo) / m as f64;
    let mut counts = vec![0usize; m];
    for &x in &v {
        let i = (((x - lo) / w) as usize).min(m - 1);
        counts[i] += 1;
    }
    let n = v.len() as f64;
    let density = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, e)| c as f64 / (n * (e[1] - e[0])))
        .collect();
    Ok(DensityEstimate { bin_edges: edges, density })
}

/// One side of an IAE comparison.
#[derive(Clone, Copy)]
pub enum DensityInput<'a> {
    Samples(&'a [f64]),
    Histogram(&'a DensityEstimate),
    /// Analytic law through its cdf.
    Cdf(&'a dyn Fn(f64) -> f64),
}

/// How the shared bin grid is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridPolicy {
    /// `bins` equal-width bins between the `lower` and `upper` quantiles of
    /// all sample inputs pooled, plus one open tail bin on each side.
    PooledQuantiles { bins: usize, lower: f64, upper: f64 },
    /// Union of the histogram edges.
    UnionOfEdges,
    Edges(Vec<f64>),
}

/// Default bin count of [`GridPolicy::PooledQuantiles`].
pub const DEFAULT_IAE_BINS: usize = 32;

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy::PooledQuantiles { bins: DEFAULT_IAE_BINS, lower: 0.001, upper: 0.999 }
    }
}

fn shared_edges(inputs: [&DensityInput<'_>; 2], policy: &GridPolicy) -> Result<Vec<f64>> {
    let mut edges = match policy {
        GridPolicy::Edges(e) => e.clone(),
        GridPolicy::UnionOfEdges => {
            let mut e = Vec::new();
            for inp in inputs {
                if let DensityInput::Histogram(h) = inp {
                    e.extend_from_slice(&h.bin_edges);
                }
            }
            e.sort_by(f64::total_cmp);
            e
        }
        GridPolicy::PooledQuantiles { bins, lower, upper } => {
            if *bins == 0 || !(0.0 <= *lower && lower < upper && *upper <= 1.0) {
                return Err(invalid("pooled-quantile grid needs bins > 0 and 0 <= lower < upper <= 1"));
            }
            let mut pooled = Vec::new();
            for inp in inputs {
                match inp {
                    DensityInput::Samples(s) => pooled.extend_from_slice(s),
                    DensityInput::Histogram(h) => pooled.extend_from_slice(&h.bin_edges),
                    DensityInput::Cdf(_) => {}
                }
            }
            if pooled.is_empty() {
                return Err(invalid("pooled-quantile grid needs at least one sampled input"));
            }
            let v = sorted(&pooled);
            let (lo, hi) = (quantile_sorted(&v, *lower), quantile_sorted(&v, *upper));
            if hi > lo {
                uniform_edges(lo, hi, *bins)
            } else {
                vec![lo]
            }
        }
    };
    edges.dedup();
    if edges.is_empty() || edges.iter().any(|e| !e.is_finite()) || !edges.windows(2).all(|w| w[0] < w[1]) {
        return Err(invalid("bin edges must be finite and increasing"));
    }
    Ok(edges)
}

/// Probability mass per bin: (−∞, e₀), [e₀, e₁), …, [e_last, ∞).
pub fn bin_masses(input: &DensityInput<'_>, edges: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(edges.len() + 1);
    match input {
        DensityInput::Samples(s) => {
            let v = sorted(s);
            let n = v.len() as f64;
            let mut prev = 0usize;
            for &e in edges {
                let below = v.partition_point(|&x| x < e);
                out.push((below - prev) as f64 / n);
                prev = below;
            }
            out.push((v.len() - prev) as f64 / n);
        }
        DensityInput::Cdf(f) => {
            let mut prev = 0.0;
            for &e in edges {
                let c = f(e).clamp(prev, 1.0);
                out.push(c - prev);
                prev = c;
            }
            out.push(1.0 - prev);
        }
        DensityInput::Histogram(h) => {
            // mass of the histogram below x
            let below = |x: f64| -> f64 {
                let mut acc = 0.0;
                for (d, e) in h.density.iter().zip(h.bin_edges.windows(2)) {
                    if x <= e[0] {
                        break;
                    }
                    acc += d * (x.min(e[1]) - e[0]);
                }
                acc
            };
            let mut prev = 0.0;
            for &e in edges {
                let c = below(e).max(prev);
                out.push(c - prev);
                prev = c;
            }
            out.push((1.0 - prev).max(0.0));
        }
    }
    out
}

/// Σ|p₁ᵢ − p₂ᵢ| over the shared bins, a value in [0, 2].
pub fn iae(a: &DensityInput<'_>, b: &DensityInput<'_>, policy: &GridPolicy) -> Result<f64> {
    for inp in [a, b] {
        if let DensityInput::Samples(s) = inp {
            if s.is_empty() {
                return Err(invalid("IAE needs nonempty samples"));
            }
        }
    }
    let edges = shared_edges([a, b], policy)?;
    let (p, q) = (bin_masses(a, &edges), bin_masses(b, &edges));
    Ok(p.iter().zip(&q).map(|(x, y)| (x - y).abs()).sum::<f64>().min(2.0))
}

/// (1/n)Σ e^{iuxⱼ} at each u.
pub fn empirical_char_fn(samples: &[f64], u_grid: &[f64]) -> Result<Vec<Complex64>> {
    if samples.is_empty() || u_grid.is_empty() {
        return Err(invalid("empirical characteristic function needs samples and a u grid"));
    }
    let n = samples.len() as f64;
    Ok(u_grid
        .par_iter()
        .map(|&u| {
            let (mut c, mut s) = (0.0, 0.0);
            for &x in samples {
                let (si, co) = (u * x).sin_cos();
                c += co;
                s += si;
            }
            Complex64::new(c / n, s / n)
        })
        .collect())
}

/// Sample moments with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMoments {
    pub n: usize,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    /// Raw fourth moment (1/n)Σx⁴.
    pub fourth: f64,
    pub fourth_se: f64,
}

pub fn sample_moments(x: &[f64]) -> SampleMoments {
    let n = x.len();
    let nf = n as f64;
    let mean = x.iter().sum::<f64>() / nf;
    let (mut c2, mut c4) = (0.0, 0.0);
    for &v in x {
        let d2 = (v - mean) * (v - mean);
        c2 += d2;
        c4 += d2 * d2;
    }
    let (c2, c4) = (c2 / nf, c4 / nf);
    let variance = c2 * nf / (nf - 1.0).max(1.0);
    let fourth = x.iter().map(|v| v.powi(4)).sum::<f64>() / nf;
    let f_var = x.iter().map(|v| (v.powi(4) - fourth).powi(2)).sum::<f64>() / (nf - 1.0).max(1.0);
    SampleMoments {
        n,
        mean,
        mean_se: (c2 / nf).sqrt(),
        variance,
        variance_se: ((c4 - c2 * c2).max(0.0) / nf).sqrt(),
        fourth,
        fourth_se: (f_var / nf).sqrt(),
    }
}

/// Sample covariance of paired draws and its standard error.
pub fn sample_covariance(a: &[f64], b: &[f64]) -> (f64, f64) {
    let nf = a.len() as f64;
    let ma = a.iter().sum::<f64>() / nf;
    let mb = b.iter().sum::<f64>() / nf;
    let prods: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).collect();
    let cov = prods.iter().sum::<f64>() / nf;
    let var = prods.iter().map(|p| (p - cov) * (p - cov)).sum::<f64>() / nf;
    (cov, (var / nf).sqrt())
}

/// Two-sample Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    /// Rejection threshold c(α)·√((n+m)/(nm)) with c(α) = √(−ln(α/2)/2).
    pub critical: f64,
    /// Asymptotic p-value from the Kolmogorov distribution.
    pub p_value: f64,
    pub reject: bool,
}

pub fn ks_two_sample(a: &[f64], b: &[f64], level: f64) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("KS test needs two nonempty samples"));
    }
    let (x, y) = (sorted(a), sorted(b));
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let scale = ((n + m) / (n * m)).sqrt();
    let critical = (-(level / 2.0).ln() / 2.0).sqrt() * scale;
    let z = d / scale;
    let p_value = if z < 0.2 {
        1.0
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let k = k as f64;
                let sign = if k as u64 % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * k * k * z * z).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    };
    Ok(KsResult { statistic: d, critical, p_value, reject: d > critical })
}

/// Grid of comparison cells. Families are Table 1 row names with a Lévy-OU
/// sampler: `bernoulli`, `poisson`, `gamma`, `chisq`, `ig`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    pub families: Vec<String>,
    pub mu: Vec<f64>,
    pub t: Vec<f64>,
    pub lambda: Vec<f64>,
    #[serde(default = "default_sigma_tilde2")]
    pub sigma_tilde2: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub x0: f64,
    /// Shot-noise samples per cell.
    #[serde(default = "default_n")]
    pub n: usize,
    /// Lévy-OU samples per cell; defaults to 10·n so the reference ensemble
    /// contributes little binning noise.
    #[serde(default)]
    pub levy_n: Option<usize>,
    #[serde(default)]
    pub grid: GridPolicy,
    #[serde(default)]
    pub seed: u64,
}

fn default_sigma_tilde2() -> f64 {
    3.0
}
fn default_alpha() -> f64 {
    1.0
}
fn default_n() -> usize {
    100_000
}

/// Row of the comparison table; failed cells carry `error` and no IAEs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub family: String,
    pub mu: f64,
    pub sigma_tilde2: f64,
    pub lambda: f64,
    pub t: f64,
    pub n: usize,
    pub iae_levy: Option<f64>,
    pub iae_gauss: Option<f64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareTable {
    pub rows: Vec<CompareRow>,
}

/// Sequence named by a Table 1 row at shared (μ, σ̃²).
pub fn sequence_from_name(name: &str, mu: f64, sigma_tilde2: f64) -> Result<FamilySequence<f64>> {
    let seq = match name {
        "bernoulli" => FamilySequence::Bernoulli { mu },
        "poisson" => FamilySequence::Poisson { mu },
        "gamma" => FamilySequence::Gamma { mu, sigma_tilde2 },
        "chisq" => FamilySequence::ChiSquare { mu },
        "ig" => FamilySequence::InverseGaussian { mu, sigma_tilde2 },
        "beta" => FamilySequence::beta_tied(mu, sigma_tilde2)?,
        "exponential" => FamilySequence::Exponential { mu },
        other => return Err(invalid(format!("unknown family {other:?}"))),
    };
    seq.validate()?;
    Ok(seq)
}

/// The three processes compared in one cell: shot noise at λ, its Lévy-OU
/// limit and the Gaussian OU with the limiting (μ, σ²).
pub fn cell_processes(
    seq: &FamilySequence<f64>,
    lambda: f64,
    alpha: f64,
    x0: f64,
) -> Result<(ShotNoiseParams<f64>, LevyOUParams<f64>, GaussianOUParams<f64>)> {
    let shot = ShotNoiseParams::new(lambda, alpha, x0, limits::table1_family(seq, lambda)?)?;
    let levy = LevyOUParams::new(alpha, x0, limits::limit_levy_density(seq)?)?;
    let lim = limits::limiting_moments(seq);
    let (Limit::Finite(mu), Limit::Finite(sigma2)) = (lim.mu, lim.sigma2) else {
        return Err(invalid(format!("{} has no finite (mu, sigma2) limit", seq.kind())));
    };
    let gauss = GaussianOUParams::new(mu, sigma2, alpha, x0)?;
    Ok((shot, levy, gauss))
}

fn run_cell(cfg: &CompareConfig, family: &str, mu: f64, lambda: f64, t: f64, seed: u64, workers: usize) -> Result<(f64, f64)> {
    let seq = sequence_from_name(family, mu, cfg.sigma_tilde2)?;
    let (shot, levy, gauss) = cell_processes(&seq, lambda, cfg.alpha, cfg.x0)?;
    let levy_n = cfg.levy_n.unwrap_or(10 * cfg.n);
    let xs = run_ensemble(&ProcessSpec::Shot(shot), t, cfg.n, mix_seed(seed, 0), workers)?;
    let ys = run_ensemble(&ProcessSpec::LevyOu(levy), t, levy_n, mix_seed(seed, 1), workers)?;
    let cdf = |x: f64| gauss.cdf(t, x);
    let (a, b) = (DensityInput::Samples(&xs.samples), DensityInput::Samples(&ys.samples));
    let iae_levy = iae(&a, &b, &cfg.grid)?;
    let edges = shared_edges([&a, &b], &cfg.grid)?;
    let iae_gauss = iae(&a, &DensityInput::Cdf(&cdf), &GridPolicy::Edges(edges))?;
    Ok((iae_levy, iae_gauss))
}

/// Runs every (family, μ, λ, t) cell, in that nesting order. Cell `i` uses
/// seed `mix_seed(cfg.seed, i)`; the Gaussian IAE is taken on the same grid
/// as the Lévy one.
pub fn compare_experiment(cfg: &CompareConfig, workers: usize) -> CompareTable {
    let mut rows = Vec::new();
    let mut index = 0u64;
    for family in &cfg.families {
        for &mu in &cfg.mu {
            for &lambda in &cfg.lambda {
                for &t in &cfg.t {
                    let seed = mix_seed(cfg.seed, index);
                    index += 1;
                    let outcome = run_cell(cfg, family, mu, lambda, t, seed, workers);
                    let (iae_levy, iae_gauss, error) = match outcome {
                        Ok((l, g)) => (Some(l), Some(g), None),
                        Err(e) => (None, None, Some(e.to_string())),
                    };
                    rows.push(CompareRow {
                        family: family.clone(),
                        mu,
                        sigma_tilde2: cfg.sigma_tilde2,
                        lambda,
                        t,
                        n: cfg.n,
                        iae_levy,
                        iae_gauss,
                        seed,
                        error,
                    });
                }
            }
        }
    }
    CompareTable { rows }
}

impl CompareTable {
    /// CSV with columns family,mu,sigma_tilde2,lambda,t,n,iae_levy,iae_gauss,seed.
    /// Failed cells leave the IAE fields empty and are listed after the
    /// table as `# cell <row>: <error>` lines.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Unsupported(format!("csv output failed: {e}"));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["family", "mu", "sigma_tilde2", "lambda", "t", "n", "iae_levy", "iae_gauss", "seed"])
            .map_err(io)?;
        let opt = |v: Option<f64>| v.map_or(String::new(), fmt_f64);
        for r in &self.rows {
            w.write_record([
                r.family.clone(),
                fmt_f64(r.mu),
                fmt_f64(r.sigma_tilde2),
                fmt_f64(r.lambda),
                fmt_f64(r.t),
                r.n.to_string(),
                opt(r.iae_levy),
                opt(r.iae_gauss),
                r.seed.to_string(),
            ])
            .map_err(io)?;
        }
        let mut inner = w.into_inner().map_err(|e| Error::Unsupported(format!("csv output failed: {e}")))?;
        for (i, r) in self.rows.iter().enumerate() {
            if let Some(e) = &r.error {
                writeln!(inner, "# cell {i}: {e}").map_err(|e| Error::Unsupported(format!("csv output failed: {e}")))?;
            }
        }
        inner.flush().map_err(|e| Error::Unsupported(format!("csv output failed: {e}")))
    }

    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::JumpFamily;
    use crate::levyou::SubordinatorSpec;

    fn bern_shot(lambda: f64) -> ProcessSpec {
        ProcessSpec::Shot(ShotNoiseParams::new(lambda, 1.0, 0.0, JumpFamily::bernoulli(1.0 / lambda).unwrap()).unwrap())
    }

    #[test]
    fn single_sample_is_stream_zero() {
        let spec = bern_shot(1000.0);
        let e = run_ensemble(&spec, 2.0, 1, 42, 1).unwrap();
        let ProcessSpec::Shot(p) = &spec else { unreachable!() };
        let direct = ShotSampler::new(p, Resolution::Floor(DEFAULT_RESOLUTION))
            .unwrap()
            .sample_at(2.0, &mut RngStream::new(42, 0));
        assert_eq!(e.samples, vec![direct]);
    }

    #[test]
    fn worker_count_does_not_change_samples() {
        let specs = [
            bern_shot(100.0),
            ProcessSpec::LevyOu(
                LevyOUParams::new(1.0, 0.0, SubordinatorSpec::GammaProc { shape: 1.0 / 3.0, rate: 1.0 / 3.0 }).unwrap(),
            ),
            ProcessSpec::GaussianOu(GaussianOUParams::new(1.0, 3.0, 1.0, 0.0).unwrap()),
        ];
        for spec in specs {
            let a = run_ensemble(&spec, 1.5, 2000, 9, 1).unwrap();
            let b = run_ensemble(&spec, 1.5, 2000, 9, 4).unwrap();
            assert_eq!(a.samples.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), b.samples.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn resource_guard_refuses_absurd_work() {
        let spec = bern_shot(1e12);
        let err = run_ensemble(&ProcessSpec::Shot(ShotNoiseParams::new(1e12, 1.0, 0.0, JumpFamily::Degenerate { j: 1e-12 }).unwrap()), 100.0, 1000, 1, 1);
        assert!(matches!(err, Err(Error::ResourceGuard(_))));
        // thinned Bernoulli at the same rate is cheap
        assert!(run_ensemble(&spec, 1.0, 10, 1, 1).is_ok());
    }

    #[test]
    fn histogram_single_bin_and_normalization() {
        let d = estimate_density(&[0.0, 1.0, 1.0, 1.0], Binning::Fixed(4)).unwrap();
        assert_eq!(d.density, vec![1.0, 0.0, 0.0, 3.0]);
        let total: f64 = d.density.iter().zip(d.bin_edges.windows(2)).map(|(p, e)| p * (e[1] - e[0])).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(estimate_density(&[2.0, 2.0], Binning::Auto).is_err());
        let auto = estimate_density(&(0..1000).map(|i| (i as f64).sqrt()).collect::<Vec<_>>(), Binning::Auto).unwrap();
        assert!(auto.density.len() >= 64);
    }

    #[test]
    fn iae_extremes() {
        let a: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let p = GridPolicy::default();
        assert_eq!(iae(&DensityInput::Samples(&a), &DensityInput::Samples(&a), &p).unwrap(), 0.0);
        let b: Vec<f64> = a.iter().map(|x| x + 10.0).collect();
        let v = iae(&DensityInput::Samples(&a), &DensityInput::Samples(&b), &p).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let h1 = estimate_density(&a, Binning::Fixed(10)).unwrap();
        let h2 = estimate_density(&b, Binning::Fixed(10)).unwrap();
        let v = iae(&DensityInput::Histogram(&h1), &DensityInput::Histogram(&h2), &GridPolicy::UnionOfEdges).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ks_detects_shift_only() {
        let a: Vec<f64> = (0..2000).map(|i| (i as f64 + 0.5) / 2000.0).collect();
        let b: Vec<f64> = (0..3000).map(|i| (i as f64 + 0.25) / 3000.0).collect();
        let r = ks_two_sample(&a, &b, 0.01).unwrap();
        assert!(!r.reject && r.p_value > 0.5);
        let c: Vec<f64> = a.iter().map(|x| x + 0.1).collect();
        let r = ks_two_sample(&a, &c, 0.01).unwrap();
        assert!(r.reject && (r.statistic - 0.1).abs() < 1e-3);
        let crit = 1.628 * ((2000.0 + 3000.0) / (2000.0 * 3000.0f64)).sqrt();
        assert!((ks_two_sample(&a, &b, 0.01).unwrap().critical - crit).abs() < 1e-3 * crit);
    }

    #[test]
    fn char_fn_at_zero_is_one() {
        let c = empirical_char_fn(&[0.3, -1.2, 5.0], &[0.0, 1.0]).unwrap();
        assert_eq!(c[0], Complex64::new(1.0, 0.0));
        let z = empirical_char_fn(&[0.0; 5], &[-3.0, 2.0]).unwrap();
        assert!(z.iter().all(|c| *c == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn failed_cells_are_recorded() {
        let cfg = CompareConfig {
            families: vec!["gamma".into(), "nope".into()],
            mu: vec![1.0],
            t: vec![1.0],
            lambda: vec![100.0],
            sigma_tilde2: 3.0,
            alpha: 1.0,
            x0: 0.0,
            n: 2000,
            levy_n: None,
            grid: GridPolicy::default(),
            seed: 5,
        };
        let table = compare_experiment(&cfg, 1);
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.failed(), 1);
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("family,mu,sigma_tilde2,lambda,t,n,iae_levy,iae_gauss,seed\n"));
        assert!(text.contains("# cell 1: invalid parameter: unknown family"));
    }
}
