//! Truncated weighted shifts on `span{e_0, ..., e_{N-1}}`.
//!
//! The backward shift sends `e_n` to `w_{n-1} e_{n-1}` and kills `e_0`; it
//! maps the truncation into itself exactly. The forward shift sends `e_n`
//! to `w_n e_{n+1}`, and the image of `e_{N-1}` is dropped.

use crate::error::{Error, Result};
use crate::exactlin::{Matrix, Scalar, Vector};
use crate::weights::WeightFamily;
use num_traits::{One, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            other => Err(Error::Parse(format!("unknown direction {other:?}"))),
        }
    }
}

/// A weight family, a truncation size `N` and a direction.
///
/// The weights `w_0..w_{N-2}` are evaluated once and checked positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftSpec {
    family: WeightFamily,
    n: usize,
    direction: Direction,
    w: Vec<Scalar>,
}

impl ShiftSpec {
    pub fn new(family: WeightFamily, n: usize, direction: Direction) -> Result<Self> {
        if n < 1 {
            return Err(Error::ParameterOutOfRange("N must be >= 1".into()));
        }
        let len = n - 1;
        family.validate_prefix(len)?;
        let w = (0..len).map(|i| family.eval(i)).collect::<Result<Vec<_>>>()?;
        Ok(ShiftSpec { family, n, direction, w })
    }

    pub fn backward(family: WeightFamily, n: usize) -> Result<Self> {
        Self::new(family, n, Direction::Backward)
    }

    pub fn forward(family: WeightFamily, n: usize) -> Result<Self> {
        Self::new(family, n, Direction::Forward)
    }

    /// Same weights and size, other direction.
    pub fn with_direction(&self, direction: Direction) -> Self {
        ShiftSpec { direction, ..self.clone() }
    }

    /// Same direction and size, all weights 1.
    pub fn unweighted(&self) -> Self {
        ShiftSpec::new(WeightFamily::ones(), self.n, self.direction).expect("unit weights are valid")
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    /// Truncation size `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// `w_i` for `i < N - 1`.
    pub fn weight(&self, i: usize) -> &Scalar {
        &self.w[i]
    }

    /// `w_lo * w_{lo+1} * ... * w_{hi-1}` (empty product is 1).
    pub fn weight_product(&self, lo: usize, hi: usize) -> Scalar {
        let mut p = Scalar::one();
        for i in lo..hi {
            p *= &self.w[i];
        }
        p
    }
}

/// Matrix of the `power`-th power of the shift in the standard basis.
pub fn matrix_of(spec: &ShiftSpec, power: usize) -> Result<Matrix> {
    if power < 1 {
        return Err(Error::ParameterOutOfRange("power must be >= 1".into()));
    }
    let n = spec.n();
    let mut m = Matrix::zeros(n, n);
    for j in 0..n {
        let img = apply(spec, power, &Vector::basis(n, j))?;
        for i in 0..n {
            let x = img.get(i);
            if !x.is_zero() {
                m.set(i, j, x.clone());
            }
        }
    }
    Ok(m)
}

/// Apply the `power`-th power of the shift to `v`. Power 0 is the identity.
pub fn apply(spec: &ShiftSpec, power: usize, v: &Vector) -> Result<Vector> {
    let n = spec.n();
    if v.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.dim() });
    }
    let mut out = Vector::zeros(n);
    for (i, x) in v.entries().iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        match spec.direction() {
            Direction::Backward => {
                if i >= power {
                    out.set(i - power, x * spec.weight_product(i - power, i));
                }
            }
            Direction::Forward => {
                if i + power < n {
                    out.set(i + power, x * spec.weight_product(i, i + power));
                }
            }
        }
    }
    Ok(out)
}

/// Diagonal `δ_0 = 1, δ_n = w_0 ⋯ w_{n-1}` of the normalising similarity.
pub fn normalizer_diag(spec: &ShiftSpec) -> Vec<Scalar> {
    let mut d = Vec::with_capacity(spec.n());
    let mut acc = Scalar::one();
    for i in 0..spec.n() {
        d.push(acc.clone());
        if i + 1 < spec.n() {
            acc *= spec.weight(i);
        }
    }
    d
}

/// `X = diag(δ_n)`, so that `X^{-1} T_1^* X` is the weighted backward shift
/// when `T_1^*` is the unweighted one.
pub fn normalizer(spec: &ShiftSpec) -> Matrix {
    let d = normalizer_diag(spec);
    let mut x = Matrix::zeros(spec.n(), spec.n());
    for (i, di) in d.into_iter().enumerate() {
        x.set(i, i, di);
    }
    x
}

/// `X^{-1}`.
pub fn normalizer_inverse(spec: &ShiftSpec) -> Matrix {
    let d = normalizer_diag(spec);
    let mut x = Matrix::zeros(spec.n(), spec.n());
    for (i, di) in d.into_iter().enumerate() {
        x.set(i, i, di.recip());
    }
    x
}

/// Truncated power series `f(z) = Σ a_i z^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalyticFn {
    coeffs: Vec<Scalar>,
}

impl AnalyticFn {
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        AnalyticFn { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        AnalyticFn { coeffs: c.iter().map(|&x| crate::exactlin::int(x)).collect() }
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// `a_i`, zero past the stored list.
    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    /// `f - f(0)`.
    pub fn without_constant(&self) -> Self {
        let mut c = self.coeffs.clone();
        if let Some(a0) = c.first_mut() {
            *a0 = Scalar::zero();
        }
        AnalyticFn { coeffs: c }
    }

    pub fn mul(&self, other: &AnalyticFn) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return AnalyticFn { coeffs: vec![] };
        }
        let mut c = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        AnalyticFn { coeffs: c }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = AnalyticFn::from_ints(&[1]);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

/// `f(S) = a_0 I + Σ_{i>=1} a_i S^i` for the backward shift `S`; terms with
/// `i >= N` vanish by nilpotency and are skipped.
pub fn analytic_apply(f: &AnalyticFn, spec: &ShiftSpec) -> Result<Matrix> {
    let n = spec.n();
    let s = matrix_of(&spec.with_direction(Direction::Backward), 1)?;
    let mut out = Matrix::identity(n).scale(&f.coeff(0));
    let mut p = Matrix::identity(n);
    for i in 1..n.min(f.coeffs().len()) {
        p = p.mul(&s)?;
        let a = f.coeff(i);
        if !a.is_zero() {
            out = out.add(&p.scale(&a))?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{int, ratio};
    use proptest::prelude::*;

    fn families() -> Vec<WeightFamily> {
        vec![
            WeightFamily::ones(),
            WeightFamily::Donoghue,
            WeightFamily::harmonic(),
            WeightFamily::Alternating38,
            WeightFamily::Geometric(ratio(2, 3)),
        ]
    }

    #[test]
    fn unit_backward_matrix() {
        let spec = ShiftSpec::backward(WeightFamily::ones(), 3).unwrap();
        let m = matrix_of(&spec, 1).unwrap();
        assert_eq!(m, Matrix::from_ints(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]).unwrap());
    }

    #[test]
    fn composed_applications() {
        let spec = ShiftSpec::backward(WeightFamily::harmonic(), 8).unwrap();
        let w = |i| spec.weight(i).clone();
        let e = |i| Vector::basis(8, i);
        assert_eq!(apply(&spec, 2, &e(2)).unwrap(), e(0).scale(&(w(1) * w(0))));
        assert!(apply(&spec, 2, &e(0)).unwrap().is_zero());
        assert_eq!(apply(&spec, 3, &e(5)).unwrap(), e(2).scale(&(w(4) * w(3) * w(2))));
        let fwd = spec.with_direction(Direction::Forward);
        assert_eq!(apply(&fwd, 1, &e(3)).unwrap(), e(4).scale(&w(3)));
        assert!(apply(&fwd, 1, &e(7)).unwrap().is_zero());
    }

    #[test]
    fn normalizer_values() {
        let spec = ShiftSpec::backward(WeightFamily::ones(), 5).unwrap();
        assert_eq!(normalizer(&spec), Matrix::identity(5));
        let g = ShiftSpec::backward(WeightFamily::Geometric(ratio(1, 2)), 4).unwrap();
        assert_eq!(normalizer_diag(&g), vec![int(1), int(1), ratio(1, 2), ratio(1, 8)]);
    }

    #[test]
    fn normalizer_conjugates_unit_shift() {
        for f in families() {
            let spec = ShiftSpec::backward(f, 7).unwrap();
            let x = normalizer(&spec);
            let xi = normalizer_inverse(&spec);
            let t1 = matrix_of(&spec.unweighted(), 1).unwrap();
            let conj = xi.mul(&t1).unwrap().mul(&x).unwrap();
            assert_eq!(conj, matrix_of(&spec, 1).unwrap());
        }
    }

    #[test]
    fn analytic_examples() {
        let spec = ShiftSpec::backward(WeightFamily::ones(), 3).unwrap();
        let j = matrix_of(&spec, 1).unwrap();
        assert_eq!(analytic_apply(&AnalyticFn::from_ints(&[0, 1]), &spec).unwrap(), j);
        let expect = j.add(&j.pow(2).unwrap()).unwrap();
        assert_eq!(analytic_apply(&AnalyticFn::from_ints(&[0, 1, 1]), &spec).unwrap(), expect);
        let id = analytic_apply(&AnalyticFn::from_ints(&[5]), &spec).unwrap();
        assert_eq!(id, Matrix::identity(3).scale(&int(5)));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(ShiftSpec::backward(WeightFamily::ones(), 0).is_err());
        let short = WeightFamily::Custom(vec![int(1), int(2)]);
        assert!(ShiftSpec::backward(short.clone(), 4).is_err());
        assert!(ShiftSpec::backward(short, 3).is_ok());
        let bad = WeightFamily::Custom(vec![int(1), int(0), int(1)]);
        assert!(ShiftSpec::backward(bad, 4).is_err());
    }

    #[test]
    fn backward_shift_is_nilpotent() {
        for f in families() {
            for n in 1..9 {
                let spec = ShiftSpec::backward(f.clone(), n).unwrap();
                let m = matrix_of(&spec, 1).unwrap();
                assert!(m.pow(n).unwrap().is_zero());
                if n > 1 {
                    assert!(!m.pow(n - 1).unwrap().is_zero());
                }
            }
        }
    }

    proptest! {
        #[test]
        fn power_coherence(a in 0usize..5, b in 0usize..5, fi in 0usize..5, coords in proptest::collection::vec(-4i64..5, 9), fwd in any::<bool>()) {
            let dir = if fwd { Direction::Forward } else { Direction::Backward };
            let spec = ShiftSpec::new(families()[fi].clone(), 9, dir).unwrap();
            let v = Vector::from_ints(&coords);
            let lhs = apply(&spec, a + b, &v).unwrap();
            let rhs = apply(&spec, a, &apply(&spec, b, &v).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            if a + b >= 1 {
                let m = matrix_of(&spec, a + b).unwrap();
                prop_assert_eq!(m.mul_vec(&v).unwrap(), apply(&spec, a + b, &v).unwrap());
            }
        }
    }
}
