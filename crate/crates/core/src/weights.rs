//! Weight-sequence catalogue and the weight-class tests.
//!
//! Exact evaluation feeds the linear algebra; the summation tests
//! (`delta_estimate`, `an_partial`, bounded variation) run in `f64` with
//! compensated summation.

use crate::error::{Error, Result};
use crate::exactlin::{int, scalar_to_f64, Scalar};
use num_bigint::BigInt;
use num_traits::{One, Pow, Signed};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A positive weight sequence `w_0, w_1, ...` with rational entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightFamily {
    /// `w_n = 2^{-n}`.
    Donoghue,
    /// `w_n = r^n`.
    Geometric(Scalar),
    /// `w_n = 1/n` for `n >= 1`, with a configurable `w_0`.
    Harmonic { w0: Scalar },
    /// `w_n = 2^{-(n+1)}` for even `n`, `2^{-(n-1)}` for odd `n`.
    Alternating38,
    Constant(Scalar),
    /// Explicit finite list; indices past the end are an error.
    Custom(Vec<Scalar>),
}

impl WeightFamily {
    pub fn ones() -> Self {
        WeightFamily::Constant(Scalar::one())
    }

    pub fn harmonic() -> Self {
        WeightFamily::Harmonic { w0: Scalar::one() }
    }

    /// Exact `w_n`.
    pub fn eval(&self, n: usize) -> Result<Scalar> {
        Ok(match self {
            WeightFamily::Donoghue => pow2_inv(n),
            WeightFamily::Geometric(r) => Pow::pow(r, n),
            WeightFamily::Harmonic { w0 } => {
                if n == 0 {
                    w0.clone()
                } else {
                    int(n as i64).recip()
                }
            }
            WeightFamily::Alternating38 => {
                if n.is_multiple_of(2) {
                    pow2_inv(n + 1)
                } else {
                    pow2_inv(n - 1)
                }
            }
            WeightFamily::Constant(c) => c.clone(),
            WeightFamily::Custom(ws) => ws.get(n).cloned().ok_or_else(|| {
                Error::ParameterOutOfRange(format!("custom weight list has {} entries, index {n} requested", ws.len()))
            })?,
        })
    }

    /// Check `w_n > 0` for `n < len`.
    pub fn validate_prefix(&self, len: usize) -> Result<()> {
        match self {
            WeightFamily::Donoghue | WeightFamily::Alternating38 => Ok(()),
            WeightFamily::Geometric(r) | WeightFamily::Constant(r) => positive(r, "parameter"),
            WeightFamily::Harmonic { w0 } => positive(w0, "w_0"),
            WeightFamily::Custom(ws) => {
                if ws.len() < len {
                    return Err(Error::InvalidWeights(format!(
                        "custom list has {} entries, {len} needed",
                        ws.len()
                    )));
                }
                for (i, w) in ws.iter().take(len).enumerate() {
                    positive(w, &format!("w_{i}"))?;
                }
                Ok(())
            }
        }
    }

    /// Family name as used on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            WeightFamily::Donoghue => "donoghue",
            WeightFamily::Geometric(_) => "geometric",
            WeightFamily::Harmonic { .. } => "harmonic",
            WeightFamily::Alternating38 => "alternating38",
            WeightFamily::Constant(_) => "constant",
            WeightFamily::Custom(_) => "custom",
        }
    }

    /// Rational parameters in serialisation order.
    pub fn params(&self) -> Vec<Scalar> {
        match self {
            WeightFamily::Donoghue | WeightFamily::Alternating38 => vec![],
            WeightFamily::Geometric(r) | WeightFamily::Constant(r) => vec![r.clone()],
            WeightFamily::Harmonic { w0 } => vec![w0.clone()],
            WeightFamily::Custom(ws) => ws.clone(),
        }
    }

    /// Rebuild from a name and parameter list.
    pub fn from_parts(name: &str, params: Vec<Scalar>) -> Result<Self> {
        let one = |params: Vec<Scalar>| -> Result<Scalar> {
            match <[Scalar; 1]>::try_from(params) {
                Ok([p]) => Ok(p),
                Err(v) => Err(Error::Parse(format!("{name} takes one parameter, got {}", v.len()))),
            }
        };
        let f = match name {
            "donoghue" => WeightFamily::Donoghue,
            "alternating38" => WeightFamily::Alternating38,
            "geometric" => WeightFamily::Geometric(one(params)?),
            "constant" => WeightFamily::Constant(one(params)?),
            "harmonic" => {
                if params.is_empty() {
                    WeightFamily::harmonic()
                } else {
                    WeightFamily::Harmonic { w0: one(params)? }
                }
            }
            "custom" => WeightFamily::Custom(params),
            other => return Err(Error::Parse(format!("unknown weight family {other:?}"))),
        };
        f.validate_prefix(0)?;
        Ok(f)
    }

    /// Parse `donoghue`, `geometric:r`, `harmonic[:w0]`, `alternating38`,
    /// `constant:c` or `custom:w0,w1,...`.
    pub fn parse(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s.trim(), None),
        };
        let params = match rest {
            None => vec![],
            Some(r) => r
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(crate::serial::parse_scalar)
                .collect::<Result<Vec<_>>>()?,
        };
        Self::from_parts(name, params)
    }

    /// True when `w_{n+1} <= w_n` is decided for every `n` by the family
    /// shape alone (used for monotone-only bounds).
    pub fn is_known_monotone(&self) -> bool {
        match self {
            WeightFamily::Donoghue | WeightFamily::Constant(_) => true,
            WeightFamily::Geometric(r) => *r <= Scalar::one(),
            WeightFamily::Harmonic { w0 } => *w0 >= Scalar::one(),
            WeightFamily::Alternating38 => false,
            WeightFamily::Custom(ws) => ws.windows(2).all(|p| p[1] <= p[0]),
        }
    }
}

impl fmt::Display for WeightFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps = self.params();
        if ps.is_empty() {
            write!(f, "{}", self.name())
        } else {
            let joined: Vec<String> = ps.iter().map(crate::serial::scalar_to_string).collect();
            write!(f, "{}:{}", self.name(), joined.join(","))
        }
    }
}

fn pow2_inv(n: usize) -> Scalar {
    Scalar::new(BigInt::one(), BigInt::one() << n)
}

fn positive(x: &Scalar, what: &str) -> Result<()> {
    if x.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidWeights(format!("{what} must be positive, got {x}")))
    }
}

/// Real-valued view of a weight sequence for the floating-point code.
pub trait WeightSequence {
    fn weight(&self, n: usize) -> f64;

    /// `ln w_n`; overridden where `w_n` itself underflows.
    fn ln_weight(&self, n: usize) -> f64 {
        self.weight(n).ln()
    }
}

impl WeightSequence for WeightFamily {
    fn weight(&self, n: usize) -> f64 {
        let p2 = |e: usize| 2f64.powi(-(e.min(5000) as i32));
        match self {
            WeightFamily::Donoghue => p2(n),
            WeightFamily::Alternating38 => p2(if n.is_multiple_of(2) { n + 1 } else { n - 1 }),
            WeightFamily::Geometric(r) => scalar_to_f64(r).powi(n.min(i32::MAX as usize) as i32),
            WeightFamily::Harmonic { w0 } => {
                if n == 0 {
                    scalar_to_f64(w0)
                } else {
                    1.0 / n as f64
                }
            }
            WeightFamily::Constant(c) => scalar_to_f64(c),
            WeightFamily::Custom(ws) => ws.get(n).map_or(0.0, scalar_to_f64),
        }
    }

    fn ln_weight(&self, n: usize) -> f64 {
        let ln2 = std::f64::consts::LN_2;
        match self {
            WeightFamily::Donoghue => -(n as f64) * ln2,
            WeightFamily::Alternating38 => {
                if n.is_multiple_of(2) {
                    -((n + 1) as f64) * ln2
                } else {
                    -((n - 1) as f64) * ln2
                }
            }
            WeightFamily::Geometric(r) => n as f64 * scalar_to_f64(r).ln(),
            WeightFamily::Harmonic { w0 } => {
                if n == 0 {
                    scalar_to_f64(w0).ln()
                } else {
                    -(n as f64).ln()
                }
            }
            WeightFamily::Constant(c) => scalar_to_f64(c).ln(),
            WeightFamily::Custom(ws) => ws.get(n).map_or(f64::NEG_INFINITY, |w| scalar_to_f64(w).ln()),
        }
    }
}

/// Weight families that need not be rational; only the floating code
/// accepts them.
#[derive(Clone, Debug, PartialEq)]
pub enum RealWeights {
    /// `w_n = r^n` for real `r > 0`.
    Geometric(f64),
    /// `w_n = (n+1)^{-alpha}`.
    PowerLaw(f64),
    Table(Vec<f64>),
}

impl WeightSequence for RealWeights {
    fn weight(&self, n: usize) -> f64 {
        self.ln_weight(n).exp()
    }

    fn ln_weight(&self, n: usize) -> f64 {
        match self {
            RealWeights::Geometric(r) => n as f64 * r.ln(),
            RealWeights::PowerLaw(a) => -a * ((n + 1) as f64).ln(),
            RealWeights::Table(t) => t.get(n).map_or(f64::NEG_INFINITY, |w| w.ln()),
        }
    }
}

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Outcome of the monotone square-summable test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Condition34 {
    HoldsOnPrefix {
        prefix: usize,
        square_sum: f64,
        /// `prefix * w_prefix^2`, which tends to zero for monotone
        /// square-summable sequences.
        tail_estimate: f64,
    },
    Fails { witness: usize, reason: Condition34Failure },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition34Failure {
    /// `w_witness > w_{witness-1}`.
    NotMonotone,
    /// Square sum plus tail estimate exceeded the budget at this index.
    SquareSumExceedsBudget,
}

impl Condition34 {
    pub fn holds(&self) -> bool {
        matches!(self, Condition34::HoldsOnPrefix { .. })
    }
}

/// Monotone decrease on `w_0..w_prefix` plus an ℓ² sanity bound.
///
/// Monotonicity is compared exactly. The square sum is accumulated in
/// floating point and, together with `n * w_n^2`, must stay below
/// `tail_budget`. The first violating index is returned.
pub fn check_condition_34(f: &WeightFamily, prefix: usize, tail_budget: f64) -> Result<Condition34> {
    if prefix < 2 {
        return Err(Error::ParameterOutOfRange(format!("prefix must be >= 2, got {prefix}")));
    }
    let mut prev = f.eval(0)?;
    let mut sq = CompensatedSum::new();
    let w0 = scalar_to_f64(&prev);
    sq.add(w0 * w0);
    for n in 1..=prefix {
        let w = f.eval(n)?;
        if w > prev {
            return Ok(Condition34::Fails { witness: n, reason: Condition34Failure::NotMonotone });
        }
        let wf = f.weight(n);
        sq.add(wf * wf);
        if sq.value() + n as f64 * wf * wf > tail_budget {
            return Ok(Condition34::Fails { witness: n, reason: Condition34Failure::SquareSumExceedsBudget });
        }
        prev = w;
    }
    let wp = f.weight(prefix);
    Ok(Condition34::HoldsOnPrefix { prefix, square_sum: sq.value(), tail_estimate: prefix as f64 * wp * wp })
}

/// Partial total variation `Σ_{n<K} |w_n - w_{n+1}|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundedVariation {
    pub k: usize,
    pub partial: f64,
    /// Set when the prefix is non-increasing: the partial telescopes to
    /// `w_0 - w_K` and the full series is bounded by `w_0`.
    pub monotone_bound: Option<f64>,
}

pub fn bounded_variation_partial(f: &WeightFamily, k: usize) -> Result<BoundedVariation> {
    if k < 1 {
        return Err(Error::ParameterOutOfRange("K must be >= 1".into()));
    }
    let mut acc = CompensatedSum::new();
    let mut monotone = true;
    let mut prev = f.eval(0)?;
    for n in 0..k {
        let next = f.eval(n + 1)?;
        if next > prev {
            monotone = false;
        }
        acc.add(scalar_to_f64(&(&prev - &next).abs()));
        prev = next;
    }
    Ok(BoundedVariation { k, partial: acc.value(), monotone_bound: monotone.then(|| f.weight(0)) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaStatus {
    BoundedEvidence,
    CertifiedDivergent,
    Inconclusive,
}

/// Which `(m, n)` cells the supremum scans.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaScope {
    /// `2 <= m <= n <= M_max`.
    Upper,
    /// All `2 <= m, n <= M_max`; cells with `n < m` use the empty product 1.
    Full,
    /// Only `m = n`.
    Diagonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaConfig {
    pub k: usize,
    pub m_max: usize,
    pub cap: f64,
    /// A cell counts as stabilised when its last term is below this.
    pub epsilon: f64,
    pub scope: DeltaScope,
}

impl DeltaConfig {
    pub fn new(k: usize, m_max: usize, cap: f64) -> Self {
        DeltaConfig { k, m_max, cap, epsilon: 1e-9, scope: DeltaScope::Upper }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub lower_bound: f64,
    pub status: DeltaStatus,
    pub k: usize,
    pub m_max: usize,
    pub witness: (usize, usize),
}

/// Scan partial sums `Σ_{k=0}^{K} (w_{k+m}…w_{k+n} / w_m…w_n)^2`.
///
/// The returned `lower_bound` is the largest partial sum seen, which is a
/// genuine lower bound for the supremum because every term is positive.
pub fn delta_estimate<W: WeightSequence + ?Sized>(f: &W, cfg: &DeltaConfig) -> Result<DeltaEstimate> {
    if cfg.k < 2 || cfg.m_max < 2 {
        return Err(Error::ParameterOutOfRange("K and M_max must be >= 2".into()));
    }
    let ln: Vec<f64> = (0..=cfg.k + cfg.m_max).map(|i| f.ln_weight(i)).collect();
    let mut best = f64::NEG_INFINITY;
    let mut witness = (2, 2);
    let mut all_stable = true;
    let mut consider = |m: usize, n: usize, total: f64, last: f64| {
        if total > best {
            best = total;
            witness = (m, n);
        }
        if !(last < cfg.epsilon) {
            all_stable = false;
        }
    };
    match cfg.scope {
        DeltaScope::Diagonal => {
            for m in 2..=cfg.m_max {
                let mut acc = CompensatedSum::new();
                let mut last = 0.0;
                for k in 0..=cfg.k {
                    last = (2.0 * (ln[k + m] - ln[m])).exp();
                    acc.add(last);
                }
                consider(m, m, acc.value(), last);
            }
        }
        DeltaScope::Upper | DeltaScope::Full => {
            for m in 2..=cfg.m_max {
                let width = cfg.m_max - m + 1;
                let mut acc = vec![CompensatedSum::new(); width];
                let mut last = vec![0.0; width];
                for k in 0..=cfg.k {
                    let mut lp = 0.0;
                    for (j, n) in (m..=cfg.m_max).enumerate() {
                        lp += ln[k + n] - ln[n];
                        let t = (2.0 * lp).exp();
                        acc[j].add(t);
                        last[j] = t;
                    }
                }
                for (j, n) in (m..=cfg.m_max).enumerate() {
                    consider(m, n, acc[j].value(), last[j]);
                }
                if cfg.scope == DeltaScope::Full && m > 2 {
                    // n < m: empty product, every term is 1.
                    consider(m, m - 1, (cfg.k + 1) as f64, 1.0);
                }
            }
        }
    }
    let status = if best > cfg.cap {
        DeltaStatus::CertifiedDivergent
    } else if all_stable {
        DeltaStatus::BoundedEvidence
    } else {
        DeltaStatus::Inconclusive
    };
    Ok(DeltaEstimate { lower_bound: best, status, k: cfg.k, m_max: cfg.m_max, witness })
}

/// `Σ_{k=1}^{K} (n/(n+k))^2`, the diagonal series of the harmonic family.
pub fn an_partial(n: usize, k: usize) -> Result<f64> {
    if n < 1 || k < 1 {
        return Err(Error::ParameterOutOfRange("n and K must be >= 1".into()));
    }
    let nf = n as f64;
    let mut acc = CompensatedSum::new();
    for j in 1..=k {
        let r = nf / (nf + j as f64);
        acc.add(r * r);
    }
    Ok(acc.value())
}

/// `sup_{n < len} w_n`, evaluated in floating point.
pub fn sup_weight<W: WeightSequence + ?Sized>(f: &W, len: usize) -> f64 {
    (0..len).map(|i| f.weight(i)).fold(0.0, f64::max)
}
