//! JSON forms of the exact objects.
//!
//! Rationals are always written `"p/q"` (integers as `"3/1"`) so output is
//! byte-stable. Parsing also accepts `"p"` and plain decimals such as
//! `"0.25"`, which are read exactly.

use crate::classify::{CanonicalForm, MixedVariant};
use crate::error::{Error, Result};
use crate::exactlin::{Scalar, Subspace, Vector};
use crate::invariants::{CyclicDecomposition, Generator};
use crate::shifts::{AnalyticFn, Direction, ShiftSpec};
use crate::weights::WeightFamily;
use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Map, Value};

pub fn scalar_to_string(x: &Scalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let int = |t: &str| t.trim().parse::<BigInt>().map_err(|_| bad());
    if let Some((p, q)) = s.split_once('/') {
        let q = int(q)?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Scalar::new(int(p)?, q));
    }
    if let Some((a, b)) = s.split_once('.') {
        let neg = a.trim_start().starts_with('-');
        let digits = b.trim();
        if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let whole = if a.is_empty() || a == "-" || a == "+" { BigInt::zero() } else { int(a)? };
        let den = num_traits::pow(BigInt::from(10), digits.len());
        let frac = Scalar::new(int(digits)?, den);
        let w = Scalar::from_integer(whole);
        return Ok(if neg { w - frac } else { w + frac });
    }
    Ok(Scalar::from_integer(int(s)?))
}

fn scalar_json(x: &Scalar) -> Value {
    Value::String(scalar_to_string(x))
}

fn scalar_from(v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => parse_scalar(s),
        Value::Number(n) if n.is_i64() => Ok(Scalar::from_integer(BigInt::from(n.as_i64().unwrap()))),
        other => Err(Error::Parse(format!("expected a rational string, got {other}"))),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

fn usize_of(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("field {key:?} must be a nonnegative integer")))
}

fn i64_of(v: &Value, key: &str) -> Result<i64> {
    field(v, key)?.as_i64().ok_or_else(|| Error::Parse(format!("field {key:?} must be an integer")))
}

fn opt_usize_of(v: &Value, key: &str) -> Result<Option<usize>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(_) => usize_of(v, key).map(Some),
    }
}

pub fn vector_to_json(v: &Vector) -> Value {
    Value::Array(v.entries().iter().map(scalar_json).collect())
}

pub fn vector_from_json(v: &Value) -> Result<Vector> {
    let arr = v.as_array().ok_or_else(|| Error::Parse("vector must be an array".into()))?;
    Ok(Vector::new(arr.iter().map(scalar_from).collect::<Result<Vec<_>>>()?))
}

pub fn subspace_to_json(s: &Subspace) -> Value {
    json!({
        "ambient_dim": s.ambient_dim(),
        "basis": s.basis().iter().map(vector_to_json).collect::<Vec<_>>(),
    })
}

/// Accepts any spanning list; the result is reduced.
pub fn subspace_from_json(v: &Value) -> Result<Subspace> {
    let n = usize_of(v, "ambient_dim")?;
    let basis = field(v, "basis")?.as_array().ok_or_else(|| Error::Parse("basis must be an array".into()))?;
    let vs = basis.iter().map(vector_from_json).collect::<Result<Vec<_>>>()?;
    crate::exactlin::span(&vs, n)
}

pub fn spec_to_json(spec: &ShiftSpec) -> Value {
    json!({
        "family": spec.family().name(),
        "params": spec.family().params().iter().map(scalar_json).collect::<Vec<_>>(),
        "N": spec.n(),
        "direction": spec.direction().as_str(),
    })
}

pub fn spec_from_json(v: &Value) -> Result<ShiftSpec> {
    let name = field(v, "family")?.as_str().ok_or_else(|| Error::Parse("family must be a string".into()))?;
    let params = match v.get("params") {
        None => vec![],
        Some(p) => p
            .as_array()
            .ok_or_else(|| Error::Parse("params must be an array".into()))?
            .iter()
            .map(scalar_from)
            .collect::<Result<Vec<_>>>()?,
    };
    let dir = match v.get("direction") {
        None => Direction::Backward,
        Some(d) => Direction::parse(d.as_str().ok_or_else(|| Error::Parse("direction must be a string".into()))?)?,
    };
    ShiftSpec::new(WeightFamily::from_parts(name, params)?, usize_of(v, "N")?, dir)
}

pub fn analytic_to_json(f: &AnalyticFn) -> Value {
    json!({ "coeffs": f.coeffs().iter().map(scalar_json).collect::<Vec<_>>() })
}

pub fn analytic_from_json(v: &Value) -> Result<AnalyticFn> {
    let c = field(v, "coeffs")?.as_array().ok_or_else(|| Error::Parse("coeffs must be an array".into()))?;
    Ok(AnalyticFn::new(c.iter().map(scalar_from).collect::<Result<Vec<_>>>()?))
}

fn generator_json(g: &Generator) -> Value {
    json!({ "vector": vector_to_json(&g.vector), "orbit_len": g.orbit_len })
}

pub fn decomposition_to_json(d: &CyclicDecomposition) -> Value {
    json!({ "l": d.l, "generators": d.generators.iter().map(generator_json).collect::<Vec<_>>() })
}

fn variant_to_json(v: &MixedVariant) -> Value {
    let mut m = Map::new();
    m.insert("variant".into(), json!(v.name()));
    match *v {
        MixedVariant::ParityStatement { n, t } => {
            m.insert("n".into(), json!(n));
            m.insert("t".into(), json!(t));
        }
        MixedVariant::ParityProofEven { n } | MixedVariant::ParityProofOdd { n } => {
            m.insert("n".into(), json!(n));
        }
        MixedVariant::Mod3Pair { r, s, n, m: mm } => {
            m.insert("r".into(), json!(r));
            m.insert("s".into(), json!(s));
            m.insert("n".into(), json!(n));
            m.insert("m".into(), json!(mm));
        }
        MixedVariant::Mod3Chain { l, r, s, n, m: mm } => {
            m.insert("l".into(), json!(l));
            m.insert("r".into(), json!(r));
            m.insert("s".into(), json!(s));
            m.insert("n".into(), json!(n));
            m.insert("m".into(), json!(mm));
        }
    }
    Value::Object(m)
}

fn variant_from_json(v: &Value) -> Result<MixedVariant> {
    let name = field(v, "variant")?.as_str().unwrap_or_default();
    Ok(match name {
        "parity_statement" => MixedVariant::ParityStatement { n: usize_of(v, "n")?, t: usize_of(v, "t")? },
        "parity_proof_even" => MixedVariant::ParityProofEven { n: usize_of(v, "n")? },
        "parity_proof_odd" => MixedVariant::ParityProofOdd { n: usize_of(v, "n")? },
        "mod3_pair" => MixedVariant::Mod3Pair {
            r: usize_of(v, "r")?,
            s: usize_of(v, "s")?,
            n: opt_usize_of(v, "n")?,
            m: opt_usize_of(v, "m")?,
        },
        "mod3_chain" => MixedVariant::Mod3Chain {
            l: usize_of(v, "l")?,
            r: usize_of(v, "r")?,
            s: usize_of(v, "s")?,
            n: opt_usize_of(v, "n")?,
            m: opt_usize_of(v, "m")?,
        },
        other => return Err(Error::Parse(format!("unknown mixed variant {other:?}"))),
    })
}

/// `{tag, params, generators}`.
pub fn form_to_json(f: &CanonicalForm) -> Value {
    let params = match f {
        CanonicalForm::Zero | CanonicalForm::FullSpace => json!({}),
        CanonicalForm::Chain { k } => json!({ "k": k }),
        CanonicalForm::Cyclic { l, n, .. } => json!({ "l": l, "n": n }),
        CanonicalForm::T2NonCyclic { n, p, .. } => json!({ "n": n, "p": p }),
        CanonicalForm::T3Case1 { n, p, t, .. } => json!({ "n": n, "p": p, "t": t }),
        CanonicalForm::T3Case2 { n, p, r, .. } | CanonicalForm::T3Case3 { n, p, r, .. } => {
            json!({ "n": n, "p": p, "r": r })
        }
        CanonicalForm::Joint { n, alpha, beta } => json!({ "n": n, "alpha": scalar_json(alpha), "beta": scalar_json(beta) }),
        CanonicalForm::ParityLattice { l, t, n } => json!({ "l": l, "t": t, "n": n }),
        CanonicalForm::ParityMixed { l, variant, alternates } => json!({
            "l": l,
            "pattern": variant_to_json(variant),
            "alternates": alternates.iter().map(variant_to_json).collect::<Vec<_>>(),
        }),
    };
    json!({
        "tag": f.tag(),
        "params": params,
        "generators": f.generators().into_iter().map(vector_to_json).collect::<Vec<_>>(),
    })
}

pub fn form_from_json(v: &Value) -> Result<CanonicalForm> {
    let tag = field(v, "tag")?.as_str().ok_or_else(|| Error::Parse("tag must be a string".into()))?;
    let p = field(v, "params")?;
    let gens: Vec<Vector> = match v.get("generators") {
        None => vec![],
        Some(g) => g
            .as_array()
            .ok_or_else(|| Error::Parse("generators must be an array".into()))?
            .iter()
            .map(vector_from_json)
            .collect::<Result<_>>()?,
    };
    let gen = |i: usize| -> Result<Vector> {
        gens.get(i).cloned().ok_or_else(|| Error::Parse(format!("{tag} needs {} generator(s)", i + 1)))
    };
    Ok(match tag {
        "Zero" => CanonicalForm::Zero,
        "FullSpace" => CanonicalForm::FullSpace,
        "Chain" => CanonicalForm::Chain { k: usize_of(p, "k")? },
        "Cyclic" => CanonicalForm::Cyclic { l: usize_of(p, "l")?, x: gen(0)?, n: usize_of(p, "n")? },
        "T2NonCyclic" => CanonicalForm::T2NonCyclic {
            n: usize_of(p, "n")?,
            p: i64_of(p, "p")?,
            x: if i64_of(p, "p")? == -1 { gens.first().cloned().unwrap_or_else(|| Vector::zeros(0)) } else { gen(0)? },
        },
        "T3Case1" => CanonicalForm::T3Case1 {
            n: usize_of(p, "n")?,
            p: i64_of(p, "p")?,
            t: usize_of(p, "t")?,
            x: gen(0)?,
            y: gen(1)?,
        },
        "T3Case2" => {
            CanonicalForm::T3Case2 { n: usize_of(p, "n")?, p: i64_of(p, "p")?, r: usize_of(p, "r")?, x: gen(0)?, y: gen(1)? }
        }
        "T3Case3" => {
            CanonicalForm::T3Case3 { n: usize_of(p, "n")?, p: i64_of(p, "p")?, r: usize_of(p, "r")?, x: gen(0)?, y: gen(1)? }
        }
        "Joint" => CanonicalForm::Joint {
            n: usize_of(p, "n")?,
            alpha: scalar_from(field(p, "alpha")?)?,
            beta: scalar_from(field(p, "beta")?)?,
        },
        "ParityLattice" => CanonicalForm::ParityLattice { l: usize_of(p, "l")?, t: usize_of(p, "t")?, n: usize_of(p, "n")? },
        "ParityMixed" => CanonicalForm::ParityMixed {
            l: usize_of(p, "l")?,
            variant: variant_from_json(field(p, "pattern")?)?,
            alternates: match p.get("alternates") {
                None => vec![],
                Some(a) => a
                    .as_array()
                    .ok_or_else(|| Error::Parse("alternates must be an array".into()))?
                    .iter()
                    .map(variant_from_json)
                    .collect::<Result<_>>()?,
            },
        },
        other => return Err(Error::Parse(format!("unknown form tag {other:?}"))),
    })
}

/// Compact deterministic rendering (object keys are sorted by serde_json).
pub fn to_line(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values always serialise")
}
