//! Truncated checks of the convergence estimates for orbits of weighted
//! shifts, quadratic closeness, and unicellularity of `f(T*)`.
//!
//! Everything here is `f64` with compensated sums except `cor44_check`,
//! which is exact. Each report carries the truncation `N` and an estimate
//! of the mass the truncation drops.

use crate::error::{Error, Result};
use crate::exactlin::Vector;
use crate::invariants::{rank_profile, unicellular_rank_test};
use crate::shifts::{analytic_apply, AnalyticFn, ShiftSpec};
use crate::weights::{delta_estimate, sup_weight, CompensatedSum, DeltaConfig, WeightSequence};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Relative slack used in every `residual <= bound` comparison.
pub const REL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Truncation size.
    #[serde(rename = "N")]
    pub n_trunc: usize,
    pub n: usize,
    pub residual: f64,
    pub bound: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub w_n: f64,
    pub pass: bool,
    /// Bound on the part of the residual lost to the truncation.
    pub tail_bound: f64,
}

fn within(residual: f64, bound: f64) -> bool {
    residual <= bound * (1.0 + REL_TOL)
}

/// `L[j] = ln w_0 + ... + ln w_{j-1}`.
fn ln_prefix<W: WeightSequence + ?Sized>(f: &W, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 0..len {
        acc += f.ln_weight(i);
        out.push(acc);
    }
    out
}

/// `Σ_{i >= from} w_i^2`, summed until terms are negligible or `limit`.
fn square_tail<W: WeightSequence + ?Sized>(f: &W, from: usize, limit: usize) -> f64 {
    let mut acc = CompensatedSum::new();
    for i in from..limit.max(from) {
        let w = f.weight(i);
        let t = w * w;
        acc.add(t);
        if t < 1e-300 && i > from + 64 {
            break;
        }
    }
    acc.value()
}

/// Lower estimate of `δ` adequate for steps up to `n_max` at truncation `n_trunc`:
/// every cell `(2, n)` with `n <= n_max` is summed over at least `N` terms.
pub fn delta_for_truncation<W: WeightSequence + ?Sized>(f: &W, n_max: usize, n_trunc: usize) -> Result<f64> {
    let cfg = DeltaConfig::new(n_trunc.max(2), n_max.max(30), f64::INFINITY);
    Ok(delta_estimate(f, &cfg)?.lower_bound.max(1.0))
}

fn x_floats(x: &Vector, n_trunc: usize) -> Result<Vec<f64>> {
    if x.dim() > n_trunc {
        return Err(Error::DimensionMismatch { expected: n_trunc, found: x.dim() });
    }
    let mut v = x.to_f64();
    v.resize(n_trunc, 0.0);
    Ok(v)
}

/// `‖T^n x / (x_0 w_0 ⋯ w_{n-1}) − e_n‖²` for the forward shift at truncation
/// `N`, against `C·w_n²` with `C = δ μ² ‖x‖² / (x_0² w_0² w_1²)`.
///
/// `delta` overrides the supremum; otherwise it is estimated with
/// `K = N` and `M_max = max(n, 30)`.
pub fn thm36_residual<W: WeightSequence + ?Sized>(
    f: &W,
    x: &Vector,
    n: usize,
    n_trunc: usize,
    delta: Option<f64>,
) -> Result<ResidualReport> {
    let delta = match delta {
        Some(d) => d,
        None => delta_for_truncation(f, n, n_trunc)?,
    };
    thm36_sweep_with(f, x, n..=n, n_trunc, delta).map(|mut v| v.remove(0))
}

/// `thm36_residual` for `n = 1..=n_max` sharing one `δ`.
pub fn thm36_sweep<W: WeightSequence + ?Sized>(
    f: &W,
    x: &Vector,
    n_max: usize,
    n_trunc: usize,
    delta: Option<f64>,
) -> Result<Vec<ResidualReport>> {
    let delta = match delta {
        Some(d) => d,
        None => delta_for_truncation(f, n_max, n_trunc)?,
    };
    thm36_sweep_with(f, x, 1..=n_max, n_trunc, delta)
}

fn thm36_sweep_with<W: WeightSequence + ?Sized>(
    f: &W,
    x: &Vector,
    steps: std::ops::RangeInclusive<usize>,
    n_trunc: usize,
    delta: f64,
) -> Result<Vec<ResidualReport>> {
    let xs = x_floats(x, n_trunc)?;
    if x.dim() == 0 || x.get(0) == &crate::exactlin::int(0) {
        return Err(Error::ZeroCoefficient(0));
    }
    let x0 = xs[0];
    let lp = ln_prefix(f, 2 * n_trunc + 2);
    let mu = sup_weight(f, 2 * n_trunc + 2);
    let mut norm2 = CompensatedSum::new();
    for v in &xs {
        norm2.add(v * v);
    }
    let (w0, w1) = (f.weight(0), f.weight(1));
    let c = delta * mu * mu * norm2.value() / (x0 * x0 * w0 * w0 * w1 * w1);
    let mut out = Vec::new();
    for n in steps {
        let mut acc = CompensatedSum::new();
        for k in 1..n_trunc.saturating_sub(n) {
            if xs[k] == 0.0 {
                continue;
            }
            let r = xs[k] / x0;
            let lr = lp[k + n] - lp[k] - lp[n];
            acc.add(r * r * (2.0 * lr).exp());
        }
        let mut dropped = CompensatedSum::new();
        for &v in xs.iter().skip(n_trunc.saturating_sub(n).max(1)) {
            dropped.add(v * v / (x0 * x0));
        }
        let w_n = f.weight(n);
        let bound = c * w_n * w_n;
        let residual = acc.value();
        out.push(ResidualReport {
            n_trunc,
            n,
            residual,
            bound,
            c,
            w_n,
            pass: within(residual, bound),
            tail_bound: delta * mu * mu * w_n * w_n / (w0 * w0 * w1 * w1) * dropped.value(),
        });
    }
    Ok(out)
}

/// `T^n x / (x_0 w_0 ⋯ w_{n-1})` for `n = 0..len`, as dense `f64` vectors.
pub fn normalized_orbit<W: WeightSequence + ?Sized>(f: &W, x: &Vector, len: usize, n_trunc: usize) -> Result<Vec<Vec<f64>>> {
    let xs = x_floats(x, n_trunc)?;
    if xs.is_empty() || xs[0] == 0.0 {
        return Err(Error::ZeroCoefficient(0));
    }
    let lp = ln_prefix(f, 2 * n_trunc + 2);
    Ok((0..len)
        .map(|n| {
            let mut v = vec![0.0; n_trunc];
            for k in 0..n_trunc.saturating_sub(n) {
                if xs[k] != 0.0 {
                    v[k + n] = xs[k] / xs[0] * (lp[k + n] - lp[k] - lp[n]).exp();
                }
            }
            v
        })
        .collect())
}

/// `e_0, ..., e_{len-1}` in dimension `n_trunc`.
pub fn unit_sequence(len: usize, n_trunc: usize) -> Vec<Vec<f64>> {
    (0..len)
        .map(|n| {
            let mut v = vec![0.0; n_trunc];
            if n < n_trunc {
                v[n] = 1.0;
            }
            v
        })
        .collect()
}

/// Partial sums `Σ_{n<=m} ‖a_n − b_n‖²` for every prefix `m`.
pub fn closeness_partials(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    let mut acc = CompensatedSum::new();
    let mut out = Vec::with_capacity(a.len());
    for (u, v) in a.iter().zip(b) {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() });
        }
        let mut d = CompensatedSum::new();
        for (p, q) in u.iter().zip(v) {
            d.add((p - q) * (p - q));
        }
        acc.add(d.value());
        out.push(acc.value());
    }
    Ok(out)
}

/// `Σ ‖a_n − b_n‖²` over the supplied prefix.
pub fn quadratic_closeness(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    Ok(closeness_partials(a, b)?.last().copied().unwrap_or(0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosenessProbe {
    pub partials: Vec<f64>,
    /// Last increment is at most `rel_tol` times the total.
    pub stabilized: bool,
}

pub fn closeness_probe(a: &[Vec<f64>], b: &[Vec<f64>], rel_tol: f64) -> Result<ClosenessProbe> {
    let partials = closeness_partials(a, b)?;
    let stabilized = match partials.as_slice() {
        [] | [_] => true,
        [.., p, q] => q - p <= rel_tol * q.abs().max(f64::MIN_POSITIVE),
    };
    Ok(ClosenessProbe { partials, stabilized })
}

/// Support pattern of the vector fed to the extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportCase {
    Even,
    Odd,
    Mixed,
}

impl SupportCase {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(SupportCase::Even),
            "odd" => Ok(SupportCase::Odd),
            "mixed" => Ok(SupportCase::Mixed),
            other => Err(Error::Parse(format!("unknown support case {other:?}"))),
        }
    }

    fn bases(self) -> impl Iterator<Item = usize> {
        let (start, step) = match self {
            SupportCase::Even => (0, 2),
            SupportCase::Odd => (1, 2),
            SupportCase::Mixed => (0, 1),
        };
        (0..).map(move |i| start + step * i)
    }
}

#[derive(Clone, Debug)]
pub struct ExtractionConfig {
    /// Tail target: `J` is the least index with `Σ_{i>=2J} w_i² < epsilon`.
    pub epsilon: f64,
    /// Fixed `K` instead of the sup rule.
    pub k: Option<usize>,
    pub max_steps: usize,
    pub delta: Option<f64>,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig { epsilon: 1e-9, k: None, max_steps: usize::MAX, delta: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionStep {
    /// `report.n` is the target index `b`; `report.w_n` is `w_b`.
    pub report: ResidualReport,
    pub k: usize,
    /// `C·Σ_{i >= b+2K} w_i²`; bounds the residual once `|x_{2K+b}|` is the
    /// largest coefficient at or beyond it.
    pub eps_bound: f64,
    pub within_eps: bool,
    /// `Σ_d |x_{2K+b+d}/x_{2K+b}|² (w_{b+d+2K-1}/w_b)²`, only for
    /// non-increasing weights.
    pub monotone_bound: Option<f64>,
    /// No nonzero coefficient at `2K+b` with `K >= J`: the step used the top
    /// of the class, as for finitely supported vectors.
    pub finite_branch: bool,
}

/// Recover `e_b` for successive `b` from `T*^{2K} x`.
///
/// Step `b` takes `z = T*^{2K}x` with the already-recovered coordinates
/// `< b` removed and normalised so `z_b = 1`; the residual is
/// `Σ_{d>=1} |z_{b+d}|²`. Each factor of the weight ratio is bounded through
/// the `δ` cell `(b+2, b+2K-1)`, giving
/// `residual <= C Σ_d w²_{b+d+2K-1} |x_{2K+b+d}/x_{2K+b}|²`, with
/// `C = μ² δ / (w_b² w_{b+1}²)`.
pub fn thm39_residual<W: WeightSequence + ?Sized>(
    f: &W,
    x: &Vector,
    case: SupportCase,
    cfg: &ExtractionConfig,
    n_trunc: usize,
) -> Result<Vec<ExtractionStep>> {
    let xs = x_floats(x, n_trunc)?;
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    let bad = match case {
        SupportCase::Even => x.support().into_iter().find(|i| i % 2 == 1),
        SupportCase::Odd => x.support().into_iter().find(|i| i % 2 == 0),
        SupportCase::Mixed => None,
    };
    if let Some(i) = bad {
        return Err(Error::SupportMismatch(format!("nonzero coefficient at index {i}")));
    }
    let limit = 4 * n_trunc + 1000;
    let tails: Vec<f64> = (0..=n_trunc + 2).map(|i| square_tail(f, i, limit)).collect();
    let j_min = match cfg.k {
        Some(_) => 0,
        None => (0..).take_while(|j| 2 * j <= n_trunc).find(|&j| tails[2 * j] < cfg.epsilon).ok_or_else(|| {
            Error::ParameterOutOfRange(format!("Σ w_i² never drops below {} inside N = {n_trunc}", cfg.epsilon))
        })?,
    };
    let delta = match cfg.delta {
        Some(d) => d,
        None => delta_estimate(f, &DeltaConfig::new(n_trunc.max(2), n_trunc.max(2), f64::INFINITY))?.lower_bound.max(1.0),
    };
    let lp = ln_prefix(f, 2 * n_trunc + 2);
    let mu = sup_weight(f, 2 * n_trunc + 2);
    let monotone = (0..2 * n_trunc).all(|i| f.weight(i + 1) <= f.weight(i));
    let mut out = Vec::new();
    for b in case.bases().take_while(|&b| b < n_trunc).take(cfg.max_steps) {
        let idx = |k: usize| 2 * k + b;
        let (k, finite_branch) = match cfg.k {
            Some(k) => {
                if idx(k) >= n_trunc || xs[idx(k)] == 0.0 {
                    break;
                }
                (k, false)
            }
            None => {
                let mut best: Option<usize> = None;
                for k in (j_min..).take_while(|&k| idx(k) < n_trunc) {
                    if xs[idx(k)] != 0.0 && best.is_none_or(|bk| xs[idx(k)].abs() > xs[idx(bk)].abs()) {
                        best = Some(k);
                    }
                }
                match best {
                    Some(k) => (k, false),
                    None => match (0..j_min.min((n_trunc - b).div_ceil(2))).rev().find(|&k| idx(k) < n_trunc && xs[idx(k)] != 0.0) {
                        Some(k) => (k, true),
                        None => break,
                    },
                }
            }
        };
        let top = idx(k);
        let ln_den = lp[b + 2 * k] - lp[b];
        let (wb, wb1) = (f.weight(b), f.weight(b + 1));
        let c = mu * mu * delta / (wb * wb * wb1 * wb1);
        let mut res = CompensatedSum::new();
        let mut weighted = CompensatedSum::new();
        let mut mono = CompensatedSum::new();
        for d in 1..n_trunc - top {
            let xd = xs[top + d];
            if xd == 0.0 {
                continue;
            }
            let r2 = (xd / xs[top]).powi(2);
            let lr = lp[b + d + 2 * k] - lp[b + d] - ln_den;
            res.add(r2 * (2.0 * lr).exp());
            let wl = f.weight(b + d + 2 * k - 1);
            weighted.add(r2 * wl * wl);
            mono.add(r2 * (wl / wb).powi(2));
        }
        let residual = res.value();
        let bound = c * weighted.value();
        let eps_bound = c * tails[(b + 2 * k).min(tails.len() - 1)];
        out.push(ExtractionStep {
            report: ResidualReport {
                n_trunc,
                n: b,
                residual,
                bound,
                c,
                w_n: wb,
                pass: within(residual, bound),
                tail_bound: c * tails[n_trunc.saturating_sub(1)],
            },
            k,
            eps_bound,
            within_eps: within(residual, eps_bound),
            monotone_bound: monotone.then(|| mono.value()),
            finite_branch,
        });
    }
    if out.is_empty() {
        return Err(Error::ZeroCoefficient(case.bases().next().unwrap_or(0)));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cor44Result {
    /// `f'(0) = a_1 ≠ 0`.
    pub hypothesis_met: bool,
    /// `f(T*) − f(0) I` has a single Jordan block.
    pub unicellular: bool,
    pub rank_profile: Vec<usize>,
}

/// Exact unicellularity check of `f(T*)` on the truncation.
pub fn cor44_check(f: &AnalyticFn, spec: &ShiftSpec) -> Result<Cor44Result> {
    let m = analytic_apply(&f.without_constant(), spec)?;
    Ok(Cor44Result {
        hypothesis_met: f.coeff(1) != crate::exactlin::int(0),
        unicellular: unicellular_rank_test(&m)?,
        rank_profile: rank_profile(&m)?,
    })
}

/// Named polynomial families for the unicellularity suite, with whether a
/// single Jordan block is expected.
pub fn cor44_families() -> Vec<(String, AnalyticFn, bool)> {
    let z = AnalyticFn::from_ints(&[0, 1]);
    let one_plus = AnalyticFn::from_ints(&[1, 1]);
    let mut out = Vec::new();
    for m in 1..=3 {
        out.push((format!("z(1+z)^{m}"), z.mul(&one_plus.pow(m)), true));
    }
    out.push(("z+z^2+z^3+z^4".into(), AnalyticFn::from_ints(&[0, 1, 1, 1, 1]), true));
    out.push(("z+4z^2+9z^3+16z^4".into(), AnalyticFn::from_ints(&[0, 1, 4, 9, 16]), true));
    out.push(("z+z^2".into(), AnalyticFn::from_ints(&[0, 1, 1]), true));
    out.push(("z^2".into(), AnalyticFn::from_ints(&[0, 0, 1]), false));
    out
}

/// CSV with columns `n,residual,bound,C,w_n,pass`.
pub fn write_residual_csv<Wr: Write>(out: Wr, reports: &[ResidualReport]) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "residual", "bound", "C", "w_n", "pass"]).map_err(io)?;
    for r in reports {
        w.write_record([
            r.n.to_string(),
            format!("{:e}", r.residual),
            format!("{:e}", r.bound),
            format!("{:e}", r.c),
            format!("{:e}", r.w_n),
            r.pass.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}
