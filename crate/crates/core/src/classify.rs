//! Canonical forms of invariant subspaces for `T*^2`, `T*^3`, both jointly,
//! and the coordinate (residue-class) forms seen at truncation.
//!
//! Classification reads the cyclic decomposition: every nonzero member of
//! an invariant subspace has a top index, those top indices fall into
//! residue classes mod `l`, and each class is an initial segment owned by
//! one generator. The forms below are parametrised by those shapes.

use crate::error::{Error, Result};
use crate::exactlin::{span, Scalar, Subspace, Vector};
use crate::invariants::{
    cyclic_orbit, invariant_closure, is_invariant, nilpotent_decompose, pair_independent, CyclicDecomposition,
};
use crate::rng;
use crate::shifts::{apply, Direction, ShiftSpec};
use num_traits::{One, Zero};
use rand::Rng;

/// Which literal support pattern a mixed coordinate form matched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MixedVariant {
    /// `M_{2n+1+t} ⊕ span{e_{2i+1-t} : i >= n+1+t}`.
    ParityStatement { n: usize, t: usize },
    /// `M_{2n+1} ⊕ span{e_{2i} : i >= n+2}` (literal even-tail pattern; it
    /// skips `e_{2n+2}` and is therefore not `T*^2`-invariant).
    ParityProofEven { n: usize },
    /// `M_{2n} ⊕ span{e_{2i+1} : i >= n}`.
    ParityProofOdd { n: usize },
    /// `span{e_{3i+r} : i <= n} ⊕ span{e_{3i+s} : i <= m}`; `None` means the
    /// class runs to the truncation boundary.
    Mod3Pair { r: usize, s: usize, n: Option<usize>, m: Option<usize> },
    /// `M_{3l+2} ⊕ span{e_{3i+r} : l < i <= n} ⊕ span{e_{3i+s} : l < i <= m}`.
    Mod3Chain { l: usize, r: usize, s: usize, n: Option<usize>, m: Option<usize> },
}

impl MixedVariant {
    pub fn name(&self) -> &'static str {
        match self {
            MixedVariant::ParityStatement { .. } => "parity_statement",
            MixedVariant::ParityProofEven { .. } => "parity_proof_even",
            MixedVariant::ParityProofOdd { .. } => "parity_proof_odd",
            MixedVariant::Mod3Pair { .. } => "mod3_pair",
            MixedVariant::Mod3Chain { .. } => "mod3_chain",
        }
    }

    /// Support indices below `n_trunc`.
    pub fn support(&self, n_trunc: usize) -> Vec<usize> {
        let class = |c: usize, from: usize, upto: Option<usize>| -> Vec<usize> {
            (from..)
                .map(|i| 3 * i + c)
                .take_while(|&k| k < n_trunc && upto.is_none_or(|u| (k - c) / 3 <= u))
                .collect()
        };
        let mut out: Vec<usize> = match *self {
            MixedVariant::ParityStatement { n, t } => {
                let mut v: Vec<usize> = (0..=(2 * n + 1 + t)).collect();
                v.extend((n + 1 + t..).map(|i| 2 * i + 1 - t).take_while(|&k| k < n_trunc));
                v
            }
            MixedVariant::ParityProofEven { n } => {
                let mut v: Vec<usize> = (0..=(2 * n + 1)).collect();
                v.extend((n + 2..).map(|i| 2 * i).take_while(|&k| k < n_trunc));
                v
            }
            MixedVariant::ParityProofOdd { n } => {
                let mut v: Vec<usize> = (0..=(2 * n)).collect();
                v.extend((n..).map(|i| 2 * i + 1).take_while(|&k| k < n_trunc));
                v
            }
            MixedVariant::Mod3Pair { r, s, n, m } => {
                let mut v = class(r, 0, n);
                v.extend(class(s, 0, m));
                v
            }
            MixedVariant::Mod3Chain { l, r, s, n, m } => {
                let mut v: Vec<usize> = (0..=(3 * l + 2)).collect();
                v.extend(class(r, l + 1, n));
                v.extend(class(s, l + 1, m));
                v
            }
        };
        out.retain(|&k| k < n_trunc);
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Canonical description of an invariant subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CanonicalForm {
    Zero,
    FullSpace,
    /// `M_k`.
    Chain { k: usize },
    /// Orbit of `x` under `T*^l`, of length `n`.
    Cyclic { l: usize, x: Vector, n: usize },
    /// `M_{n-p-2} + span{x, T*^2 x, ..., T*^{2p} x}` with `top(x) = n + p`.
    T2NonCyclic { n: usize, p: i64, x: Vector },
    /// Two full `T*^3` orbits; `n + p = 3j + t`.
    T3Case1 { n: usize, p: i64, t: usize, x: Vector, y: Vector },
    /// `M_{n-2p-3+3r} + span{x..T*^{3(p-r)}x} + span{y..T*^{3(p-2r)}y}`.
    T3Case2 { n: usize, p: i64, r: usize, x: Vector, y: Vector },
    /// `M_{n-2p-2+3r} + span{x..T*^{3(p-r)}x} + span{y..T*^{3(p-2r-1)}y}`.
    T3Case3 { n: usize, p: i64, r: usize, x: Vector, y: Vector },
    /// `span{e_0, ..., e_{n-2}, alpha e_{n-1} + beta e_n}`.
    Joint { n: usize, alpha: Scalar, beta: Scalar },
    /// `span{e_{li+t}}` up to the truncation; `n` is its dimension there.
    ParityLattice { l: usize, t: usize, n: usize },
    /// Mixed coordinate form; `alternates` lists other patterns producing
    /// the same support.
    ParityMixed { l: usize, variant: MixedVariant, alternates: Vec<MixedVariant> },
}

impl CanonicalForm {
    pub fn tag(&self) -> &'static str {
        match self {
            CanonicalForm::Zero => "Zero",
            CanonicalForm::FullSpace => "FullSpace",
            CanonicalForm::Chain { .. } => "Chain",
            CanonicalForm::Cyclic { .. } => "Cyclic",
            CanonicalForm::T2NonCyclic { .. } => "T2NonCyclic",
            CanonicalForm::T3Case1 { .. } => "T3Case1",
            CanonicalForm::T3Case2 { .. } => "T3Case2",
            CanonicalForm::T3Case3 { .. } => "T3Case3",
            CanonicalForm::Joint { .. } => "Joint",
            CanonicalForm::ParityLattice { .. } => "ParityLattice",
            CanonicalForm::ParityMixed { .. } => "ParityMixed",
        }
    }

    /// Integer shape parameters `(name, value)` used to compare forms across
    /// weight families.
    pub fn shape_params(&self) -> Vec<(&'static str, i64)> {
        match self {
            CanonicalForm::Zero | CanonicalForm::FullSpace => vec![],
            CanonicalForm::Chain { k } => vec![("k", *k as i64)],
            CanonicalForm::Cyclic { l, n, .. } => vec![("l", *l as i64), ("n", *n as i64)],
            CanonicalForm::T2NonCyclic { n, p, .. } => vec![("n", *n as i64), ("p", *p)],
            CanonicalForm::T3Case1 { n, p, t, .. } => vec![("n", *n as i64), ("p", *p), ("t", *t as i64)],
            CanonicalForm::T3Case2 { n, p, r, .. } | CanonicalForm::T3Case3 { n, p, r, .. } => {
                vec![("n", *n as i64), ("p", *p), ("r", *r as i64)]
            }
            CanonicalForm::Joint { n, .. } => vec![("n", *n as i64)],
            CanonicalForm::ParityLattice { l, t, n } => vec![("l", *l as i64), ("t", *t as i64), ("n", *n as i64)],
            CanonicalForm::ParityMixed { l, .. } => vec![("l", *l as i64)],
        }
    }

    /// Generator vectors carried by the form.
    pub fn generators(&self) -> Vec<&Vector> {
        match self {
            CanonicalForm::Cyclic { x, .. } | CanonicalForm::T2NonCyclic { x, .. } => vec![x],
            CanonicalForm::T3Case1 { x, y, .. }
            | CanonicalForm::T3Case2 { x, y, .. }
            | CanonicalForm::T3Case3 { x, y, .. } => vec![x, y],
            _ => vec![],
        }
    }

    /// Orbit lengths, largest first, that a cyclic decomposition under
    /// `T*^l` must show for this form.
    pub fn expected_orbit_lengths(&self, l: usize) -> Vec<usize> {
        let mut v: Vec<i64> = match self {
            CanonicalForm::Zero => vec![],
            CanonicalForm::Chain { k } => (0..l).map(|c| if c <= *k { ((k - c) / l + 1) as i64 } else { 0 }).collect(),
            CanonicalForm::Cyclic { n, .. } => vec![*n as i64],
            CanonicalForm::T2NonCyclic { n, p, .. } => {
                let h = *n as i64 + p;
                let big = h / 2 + 1;
                vec![big, *n as i64 - big]
            }
            CanonicalForm::T3Case1 { n, p, .. } => {
                let j = (*n as i64 + p) / 3;
                vec![j + 1, *n as i64 - j - 1]
            }
            CanonicalForm::T3Case2 { n, p, r, .. } => {
                let (n, r) = (*n as i64, *r as i64);
                let (j, t) = ((n + p) / 3, (n + p) % 3);
                match t {
                    0 => vec![j + 1, j - r, n - 2 * j - 1 + r],
                    2 => vec![j + 1, j - r + 1, n - 2 * j - 2 + r],
                    _ => vec![j + 1, j + 1, n - 2 * j - 2],
                }
            }
            CanonicalForm::T3Case3 { n, p, r, .. } => {
                let (n, r) = (*n as i64, *r as i64);
                let j = (n + p) / 3;
                vec![j + 1, j - r, n - 2 * j - 1 + r]
            }
            _ => vec![],
        };
        v.retain(|&x| x > 0);
        let mut u: Vec<usize> = v.into_iter().map(|x| x as usize).collect();
        u.sort_unstable_by(|a, b| b.cmp(a));
        u
    }
}

fn backward(spec: &ShiftSpec) -> ShiftSpec {
    if spec.direction() == Direction::Backward {
        spec.clone()
    } else {
        spec.with_direction(Direction::Backward)
    }
}

fn range_err(msg: String) -> Error {
    Error::ParameterOutOfRange(msg)
}

fn check_vec(x: &Vector, spec: &ShiftSpec) -> Result<()> {
    if x.dim() != spec.n() {
        return Err(Error::DimensionMismatch { expected: spec.n(), found: x.dim() });
    }
    Ok(())
}

fn check_top(x: &Vector, expected: usize) -> Result<()> {
    match x.top_index() {
        None => Err(Error::ZeroVector),
        Some(h) if h == expected => Ok(()),
        Some(h) => Err(Error::TopIndexMismatch { expected, found: h }),
    }
}

/// First `count` orbit vectors of `x` under `T*^l` (fewer if the orbit is
/// shorter; none when `count <= 0`).
fn orbit_prefix(x: &Vector, spec: &ShiftSpec, l: usize, count: i64) -> Result<Vec<Vector>> {
    if count <= 0 {
        return Ok(vec![]);
    }
    let mut o = cyclic_orbit(x, spec, l)?;
    o.truncate(count as usize);
    Ok(o)
}

fn chain_plus(spec: &ShiftSpec, c: i64, parts: Vec<Vec<Vector>>) -> Result<Subspace> {
    let n = spec.n();
    if c >= n as i64 {
        return Err(range_err(format!("chain end {c} exceeds truncation {n}")));
    }
    let mut vs: Vec<Vector> = (0..=c).filter(|&i| i >= 0).map(|i| Vector::basis(n, i as usize)).collect();
    for p in parts {
        vs.extend(p);
    }
    span(&vs, n)
}

fn expect_dim(s: Subspace, n: usize, what: &str) -> Result<Subspace> {
    if s.dim() == n {
        Ok(s)
    } else {
        Err(Error::IndependenceFails(format!("{what} spans dimension {} instead of {n}", s.dim())))
    }
}

/// `span{e_0, ..., e_{n-p-2}} + span{x, T*^2 x, ..., T*^{2p} x}`.
///
/// For `p = -1` the orbit part is empty and the result is `M_{n-1}`; `x` is
/// ignored.
pub fn construct_t2(n: usize, p: i64, x: &Vector, spec: &ShiftSpec) -> Result<Subspace> {
    let b = backward(spec);
    if n < 2 || p < -1 || p > n as i64 - 3 {
        return Err(range_err(format!("need n >= 2 and -1 <= p <= n-3, got n={n}, p={p}")));
    }
    if p == -1 {
        if n > b.n() {
            return Err(range_err(format!("M_{} exceeds truncation {}", n - 1, b.n())));
        }
        return Ok(Subspace::chain(b.n(), n as i64 - 1));
    }
    check_vec(x, &b)?;
    check_top(x, (n as i64 + p) as usize)?;
    let s = chain_plus(&b, n as i64 - p - 2, vec![orbit_prefix(x, &b, 2, p + 1)?])?;
    expect_dim(s, n, "T2 form")
}

/// Materialise any of the `T*^3` forms (cases 1-3, cyclic, chain).
pub fn construct_t3(form: &CanonicalForm, spec: &ShiftSpec) -> Result<Subspace> {
    let b = backward(spec);
    match form {
        CanonicalForm::Chain { .. } | CanonicalForm::Cyclic { .. } | CanonicalForm::Zero => materialize(form, &b),
        CanonicalForm::T3Case1 { n, p, t, x, y } => {
            let (n, p) = (*n, *p);
            let h = n as i64 + p;
            if n < 2 || p < -1 || h > 3 * n as i64 - 4 || h.rem_euclid(3) != *t as i64 {
                return Err(range_err(format!("case 1 needs -1 <= p <= 2n-4 and t = (n+p) mod 3, got n={n} p={p} t={t}")));
            }
            check_vec(x, &b)?;
            check_vec(y, &b)?;
            check_top(x, h as usize)?;
            let j = h / 3;
            let ylen = cyclic_orbit(y, &b, 3)?.len() as i64;
            if ylen != n as i64 - j - 1 {
                return Err(range_err(format!("case 1 needs an orbit of length {} for y, got {ylen}", n as i64 - j - 1)));
            }
            if !pair_independent(x, y, &b, 3)? {
                return Err(Error::IndependenceFails("terminal orbit vectors of x and y are dependent".into()));
            }
            let s = chain_plus(&b, -1, vec![cyclic_orbit(x, &b, 3)?, cyclic_orbit(y, &b, 3)?])?;
            expect_dim(s, n, "case 1 form")
        }
        CanonicalForm::T3Case2 { n, p, r, x, y } | CanonicalForm::T3Case3 { n, p, r, x, y } => {
            let case3 = matches!(form, CanonicalForm::T3Case3 { .. });
            let (n, p, r) = (*n as i64, *p, *r as i64);
            let h = n + p;
            let (j, t) = (h.div_euclid(3), h.rem_euclid(3));
            if n < 3 || p < 0 {
                return Err(range_err(format!("cases 2/3 need n >= 3 and p >= 0, got n={n} p={p}")));
            }
            let (ylen, c, xcount, ycount) = if case3 {
                if t != 1 || 2 * r > p {
                    return Err(range_err(format!("case 3 needs n+p = 1 mod 3 and 0 <= r <= p/2, got n={n} p={p} r={r}")));
                }
                (j - r, n - 2 * p - 2 + 3 * r, p - r + 1, p - 2 * r)
            } else {
                if 2 * r > p + 1 || (t == 1 && r != 0) {
                    return Err(range_err(format!("case 2 needs 0 <= r <= (p+1)/2 (r = 0 when n+p = 1 mod 3), got n={n} p={p} r={r}")));
                }
                let ylen = match t {
                    0 => j - r,
                    2 => j - r + 1,
                    _ => j + 1,
                };
                (ylen, n - 2 * p - 3 + 3 * r, p - r + 1, p - 2 * r + 1)
            };
            check_vec(x, &b)?;
            check_vec(y, &b)?;
            check_top(x, h as usize)?;
            let got = cyclic_orbit(y, &b, 3)?.len() as i64;
            if got != ylen {
                return Err(range_err(format!("y must have an orbit of length {ylen}, got {got}")));
            }
            if !pair_independent(x, y, &b, 3)? {
                return Err(Error::IndependenceFails("terminal orbit vectors of x and y are dependent".into()));
            }
            let s = chain_plus(&b, c, vec![orbit_prefix(x, &b, 3, xcount)?, orbit_prefix(y, &b, 3, ycount)?])?;
            expect_dim(s, n as usize, if case3 { "case 3 form" } else { "case 2 form" })
        }
        other => Err(range_err(format!("{} is not a T*^3 form", other.tag()))),
    }
}

/// Subspace described by any canonical form, inside the spec's truncation.
pub fn materialize(form: &CanonicalForm, spec: &ShiftSpec) -> Result<Subspace> {
    let b = backward(spec);
    let nt = b.n();
    match form {
        CanonicalForm::Zero => Ok(Subspace::zero(nt)),
        CanonicalForm::FullSpace => Ok(Subspace::full(nt)),
        CanonicalForm::Chain { k } => {
            if *k >= nt {
                return Err(range_err(format!("M_{k} exceeds truncation {nt}")));
            }
            Ok(Subspace::chain(nt, *k as i64))
        }
        CanonicalForm::Cyclic { l, x, n } => {
            check_vec(x, &b)?;
            let o = cyclic_orbit(x, &b, *l)?;
            if o.len() != *n {
                return Err(range_err(format!("orbit has length {}, form says {n}", o.len())));
            }
            span(&o, nt)
        }
        CanonicalForm::T2NonCyclic { n, p, x } => construct_t2(*n, *p, x, &b),
        CanonicalForm::T3Case1 { .. } | CanonicalForm::T3Case2 { .. } | CanonicalForm::T3Case3 { .. } => {
            construct_t3(form, &b)
        }
        CanonicalForm::Joint { n, alpha, beta } => {
            let n = *n;
            if n < 1 || (alpha.is_zero() && beta.is_zero()) {
                return Err(range_err("joint form needs n >= 1 and (alpha, beta) != (0, 0)".into()));
            }
            if n > nt || (n == nt && !beta.is_zero()) {
                return Err(range_err(format!("joint form of dimension {n} does not fit truncation {nt}")));
            }
            let mut v = Vector::zeros(nt);
            v.set(n - 1, alpha.clone());
            if n < nt {
                v.set(n, beta.clone());
            }
            let mut vs: Vec<Vector> = (0..n - 1).map(|i| Vector::basis(nt, i)).collect();
            vs.push(v);
            span(&vs, nt)
        }
        CanonicalForm::ParityLattice { l, t, .. } => {
            Ok(Subspace::coordinate(nt, (0..).map(|i| l * i + t).take_while(|&k| k < nt)))
        }
        CanonicalForm::ParityMixed { variant, .. } => Ok(Subspace::coordinate(nt, variant.support(nt))),
    }
}

fn decompose_checked(s: &Subspace, spec: &ShiftSpec, l: usize) -> Result<CyclicDecomposition> {
    if s.ambient_dim() != spec.n() {
        return Err(Error::DimensionMismatch { expected: spec.n(), found: s.ambient_dim() });
    }
    nilpotent_decompose(s, spec, l)
}

fn verified(form: CanonicalForm, s: &Subspace, spec: &ShiftSpec) -> Result<CanonicalForm> {
    let m = materialize(&form, spec).map_err(|e| Error::Unclassifiable(format!("{}: {e}", form.tag())))?;
    if &m == s {
        Ok(form)
    } else {
        Err(Error::Unclassifiable(format!("{} form does not reproduce the input", form.tag())))
    }
}

/// Canonical form of a `T*^2`-invariant subspace.
pub fn classify_t2(s: &Subspace, spec: &ShiftSpec) -> Result<CanonicalForm> {
    let b = backward(spec);
    let d = decompose_checked(s, &b, 2)?;
    let n = s.dim();
    if n == 0 {
        return Ok(CanonicalForm::Zero);
    }
    let x = d.generators[0].vector.clone();
    if d.generator_count() == 1 {
        return verified(CanonicalForm::Cyclic { l: 2, x, n }, s, &b);
    }
    let p = d.chain_bound() - n as i64;
    verified(CanonicalForm::T2NonCyclic { n, p, x }, s, &b)
}

/// Canonical form of a `T*^3`-invariant subspace.
pub fn classify_t3(s: &Subspace, spec: &ShiftSpec) -> Result<CanonicalForm> {
    let b = backward(spec);
    let d = decompose_checked(s, &b, 3)?;
    let n = s.dim();
    if n == 0 {
        return Ok(CanonicalForm::Zero);
    }
    let gens = &d.generators;
    let x = gens[0].vector.clone();
    if gens.len() == 1 {
        return verified(CanonicalForm::Cyclic { l: 3, x, n }, s, &b);
    }
    let h = d.chain_bound();
    let p = h - n as i64;
    if p == -1 {
        return verified(CanonicalForm::Chain { k: n - 1 }, s, &b);
    }
    let (j, t) = (h / 3, (h % 3) as usize);
    if gens.len() == 2 {
        let y = gens[1].vector.clone();
        return verified(CanonicalForm::T3Case1 { n, p, t, x, y }, s, &b);
    }
    // Three classes: y is the longer of the two remaining orbits; on a tie
    // take the higher top index (the y segment is then empty anyway).
    let (g1, g2) = (&gens[1], &gens[2]);
    let yg = if g2.orbit_len > g1.orbit_len { g2 } else { g1 };
    let y = yg.vector.clone();
    let ay = yg.orbit_len as i64;
    let form = match t {
        0 => CanonicalForm::T3Case2 { n, p, r: nonneg(j - ay)?, x, y },
        2 => CanonicalForm::T3Case2 { n, p, r: nonneg(j + 1 - ay)?, x, y },
        _ if ay == j + 1 => CanonicalForm::T3Case2 { n, p, r: 0, x, y },
        _ => CanonicalForm::T3Case3 { n, p, r: nonneg(j - ay)?, x, y },
    };
    verified(form, s, &b)
}

fn nonneg(r: i64) -> Result<usize> {
    usize::try_from(r).map_err(|_| Error::Unclassifiable(format!("negative shape parameter {r}")))
}

/// Canonical form of a subspace invariant under both `T*^2` and `T*^3`.
pub fn classify_joint(s: &Subspace, spec: &ShiftSpec) -> Result<CanonicalForm> {
    let b = backward(spec);
    if s.ambient_dim() != b.n() {
        return Err(Error::DimensionMismatch { expected: b.n(), found: s.ambient_dim() });
    }
    for power in [2, 3] {
        if !is_invariant(s, &b, power)? {
            return Err(Error::NotInvariant { power });
        }
    }
    let n = s.dim();
    if n == 0 {
        return Ok(CanonicalForm::Zero);
    }
    let last = s.basis().last().expect("nonempty");
    let alpha = last.get(n - 1).clone();
    let beta = if n < b.n() { last.get(n).clone() } else { Scalar::zero() };
    verified(CanonicalForm::Joint { n, alpha, beta }, s, &b)
}

/// Recognise a coordinate subspace among the residue-class patterns for
/// `power` 2 or 3.
///
/// Order: zero, full space, single residue class, initial chain `M_k`,
/// then the mixed patterns. Non-coordinate input is rejected.
pub fn classify_parity_lattice(s: &Subspace, spec: &ShiftSpec, power: usize) -> Result<CanonicalForm> {
    if power != 2 && power != 3 {
        return Err(range_err(format!("parity patterns exist for powers 2 and 3, got {power}")));
    }
    let nt = spec.n();
    if s.ambient_dim() != nt {
        return Err(Error::DimensionMismatch { expected: nt, found: s.ambient_dim() });
    }
    if !s.is_coordinate() {
        return Err(Error::NonCoordinate);
    }
    let sup = s.coordinate_support();
    if sup.is_empty() {
        return Ok(CanonicalForm::Zero);
    }
    if sup.len() == nt {
        return Ok(CanonicalForm::FullSpace);
    }
    for t in 0..power {
        let lat: Vec<usize> = (0..).map(|i| power * i + t).take_while(|&k| k < nt).collect();
        if lat == sup {
            return Ok(CanonicalForm::ParityLattice { l: power, t, n: sup.len() });
        }
    }
    let prefix = sup.iter().enumerate().take_while(|(i, &k)| *i == k).count();
    if prefix == sup.len() {
        return Ok(CanonicalForm::Chain { k: prefix - 1 });
    }
    let candidates = if power == 2 { parity2_candidates(prefix) } else { mod3_candidates(&sup, nt) };
    let mut hits: Vec<MixedVariant> = candidates.into_iter().filter(|v| v.support(nt) == sup).collect();
    if hits.is_empty() {
        return Err(Error::UnrecognizedPattern);
    }
    let variant = hits.remove(0);
    Ok(CanonicalForm::ParityMixed { l: power, variant, alternates: hits })
}

/// Candidate mixed patterns given the length of the initial run `0..prefix`.
fn parity2_candidates(prefix: usize) -> Vec<MixedVariant> {
    let mut out = Vec::new();
    if prefix == 0 {
        return out;
    }
    let last = prefix - 1;
    if last % 2 == 1 {
        out.push(MixedVariant::ParityStatement { n: (last - 1) / 2, t: 0 });
    } else if last >= 2 {
        out.push(MixedVariant::ParityStatement { n: (last - 2) / 2, t: 1 });
    }
    if last % 2 == 1 {
        out.push(MixedVariant::ParityProofEven { n: (last - 1) / 2 });
        out.push(MixedVariant::ParityProofOdd { n: (last - 1) / 2 });
    }
    out
}

fn mod3_candidates(sup: &[usize], nt: usize) -> Vec<MixedVariant> {
    // Per residue class: count of members if they form an initial segment.
    let mut counts = [0usize; 3];
    for c in 0..3 {
        let members: Vec<usize> = sup.iter().copied().filter(|k| k % 3 == c).collect();
        if members.iter().enumerate().any(|(i, &k)| k != 3 * i + c) {
            return vec![];
        }
        counts[c] = members.len();
    }
    let class_size = |c: usize| if c < nt { (nt - 1 - c) / 3 + 1 } else { 0 };
    let upto = |c: usize| if counts[c] == class_size(c) { None } else { Some(counts[c] - 1) };
    let full = |c: usize| counts[c] > 0 && counts[c] == class_size(c);
    let nonempty: Vec<usize> = (0..3).filter(|&c| counts[c] > 0).collect();
    let mut out = Vec::new();
    if nonempty.len() == 2 && nonempty.iter().any(|&c| full(c)) {
        let (r, s) = (nonempty[0], nonempty[1]);
        out.push(MixedVariant::Mod3Pair { r, s, n: upto(r), m: upto(s) });
    }
    if nonempty.len() == 3 {
        let q = (0..3).min_by_key(|&c| 3 * (counts[c] - 1) + c).expect("three classes");
        let l = counts[q] - 1;
        let others: Vec<usize> = (0..3).filter(|&c| c != q).collect();
        let (r, s) = (others[0], others[1]);
        if full(r) || full(s) {
            out.push(MixedVariant::Mod3Chain { l, r, s, n: upto(r), m: upto(s) });
        }
    }
    out
}

/// Random `T*^power`-invariant subspace of the given dimension.
///
/// Random sparse vectors are added and their orbit span taken until the
/// dimension reaches the target; any excess is removed by replacing a
/// randomly chosen generator `g` of the cyclic decomposition with
/// `T*^power g`, which shortens that orbit by one.
pub fn random_invariant(spec: &ShiftSpec, power: usize, dim: usize, seed: u64) -> Result<Subspace> {
    let b = backward(spec);
    let nt = b.n();
    if dim > nt || power == 0 {
        return Err(Error::UnreachableDimension(dim));
    }
    if dim == 0 {
        return Ok(Subspace::zero(nt));
    }
    let mut r = rng::from_seed(seed);
    let max_top = (power * dim + power - 1).min(nt - 1);
    let mut vs: Vec<Vector> = Vec::new();
    let mut s = Subspace::zero(nt);
    let mut guard = 0;
    while s.dim() < dim {
        guard += 1;
        if guard > 10 * nt + 100 {
            return Err(Error::UnreachableDimension(dim));
        }
        let top = r.gen_range(0..=max_top);
        vs.push(rng::vector_with_top(&mut r, nt, top, 0.5));
        s = invariant_closure(&vs, &b, power)?;
    }
    while s.dim() > dim {
        let d = nilpotent_decompose(&s, &b, power)?;
        let pick = r.gen_range(0..d.generators.len());
        let mut gens: Vec<Vector> = d.generators.into_iter().map(|g| g.vector).collect();
        gens[pick] = apply(&b, power, &gens[pick])?;
        s = invariant_closure(&gens, &b, power)?;
    }
    Ok(s)
}

/// Smallest subspace containing `vs` and invariant under `T*^2` and `T*^3`:
/// the span of `T*^j v` for `j = 0` and every `j >= 2`.
pub fn joint_closure(vs: &[Vector], spec: &ShiftSpec) -> Result<Subspace> {
    let b = backward(spec);
    let mut all = Vec::new();
    for v in vs {
        all.push(v.clone());
        let mut j = 2;
        loop {
            let w = apply(&b, j, v)?;
            if w.is_zero() {
                break;
            }
            all.push(w);
            j += 1;
        }
    }
    span(&all, b.n())
}

/// Random subspace invariant under both `T*^2` and `T*^3`, by rejection:
/// close a few random vectors and keep the result when it has the target
/// dimension.
pub fn random_joint_invariant(spec: &ShiftSpec, dim: usize, seed: u64) -> Result<Subspace> {
    let b = backward(spec);
    let nt = b.n();
    if dim > nt {
        return Err(Error::UnreachableDimension(dim));
    }
    if dim == 0 {
        return Ok(Subspace::zero(nt));
    }
    let mut r = rng::from_seed(seed);
    let max_top = (dim + 1).min(nt - 1);
    for _ in 0..10_000 {
        let k = r.gen_range(1..=3);
        let vs: Vec<Vector> = (0..k)
            .map(|_| {
                let top = r.gen_range(0..=max_top);
                rng::vector_with_top(&mut r, nt, top, 0.5)
            })
            .collect();
        let s = joint_closure(&vs, &b)?;
        if s.dim() == dim {
            return Ok(s);
        }
    }
    Err(Error::UnreachableDimension(dim))
}

/// `(alpha, beta)` normalised so the first nonzero entry is 1.
pub fn normalized_pair(alpha: &Scalar, beta: &Scalar) -> (Scalar, Scalar) {
    if !alpha.is_zero() {
        (Scalar::one(), beta / alpha)
    } else {
        (Scalar::zero(), Scalar::one())
    }
}
