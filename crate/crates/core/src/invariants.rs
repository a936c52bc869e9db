//! Invariance tests, cyclic orbits and cyclic decompositions for powers of
//! the backward shift.
//!
//! Orbits and decompositions always use the backward direction of the
//! given spec; `is_invariant` honours the spec's direction.

use crate::error::{Error, Result};
use crate::exactlin::{is_direct_sum, rank, span, Matrix, Subspace, Vector};
use crate::shifts::{apply, Direction, ShiftSpec};

fn check_ambient(s: &Subspace, spec: &ShiftSpec) -> Result<()> {
    if s.ambient_dim() != spec.n() {
        return Err(Error::DimensionMismatch { expected: spec.n(), found: s.ambient_dim() });
    }
    Ok(())
}

fn backward(spec: &ShiftSpec) -> ShiftSpec {
    if spec.direction() == Direction::Backward {
        spec.clone()
    } else {
        spec.with_direction(Direction::Backward)
    }
}

/// True iff the `power`-th shift maps every basis vector of `s` into `s`.
pub fn is_invariant(s: &Subspace, spec: &ShiftSpec, power: usize) -> Result<bool> {
    check_ambient(s, spec)?;
    for b in s.basis() {
        if !s.contains(&apply(spec, power, b)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `[x, S x, S^2 x, ...]` for `S = T*^l`, stopping before the first zero.
pub fn cyclic_orbit(x: &Vector, spec: &ShiftSpec, l: usize) -> Result<Vec<Vector>> {
    if x.dim() != spec.n() {
        return Err(Error::DimensionMismatch { expected: spec.n(), found: x.dim() });
    }
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    if l == 0 {
        return Err(Error::ParameterOutOfRange("orbit power must be >= 1".into()));
    }
    let b = backward(spec);
    let mut out = vec![x.clone()];
    loop {
        let next = apply(&b, l, out.last().expect("nonempty"))?;
        if next.is_zero() {
            return Ok(out);
        }
        out.push(next);
    }
}

/// Span of the orbits of the given vectors: the smallest `T*^l`-invariant
/// subspace containing them.
pub fn invariant_closure(vs: &[Vector], spec: &ShiftSpec, l: usize) -> Result<Subspace> {
    let mut all = Vec::new();
    for v in vs {
        if !v.is_zero() {
            all.extend(cyclic_orbit(v, spec, l)?);
        }
    }
    span(&all, spec.n())
}

/// One cyclic summand: generator and the length of its orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub vector: Vector,
    pub orbit_len: usize,
}

/// Direct-sum splitting of a `T*^l`-invariant subspace into cyclic orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicDecomposition {
    pub l: usize,
    pub generators: Vec<Generator>,
    pub spec: ShiftSpec,
}

impl CyclicDecomposition {
    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// Smallest `k` with every orbit inside `M_k`; `-1` when empty.
    pub fn chain_bound(&self) -> i64 {
        self.generators.iter().filter_map(|g| g.vector.top_index()).max().map_or(-1, |k| k as i64)
    }

    /// Orbit lengths, largest first.
    pub fn orbit_lengths(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.generators.iter().map(|g| g.orbit_len).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }

    /// Each orbit's span, in generator order.
    pub fn orbit_spaces(&self) -> Result<Vec<Subspace>> {
        self.generators
            .iter()
            .map(|g| span(&cyclic_orbit(&g.vector, &self.spec, self.l)?, self.spec.n()))
            .collect()
    }

    pub fn recompose(&self) -> Result<Subspace> {
        let mut acc = Subspace::zero(self.spec.n());
        for o in self.orbit_spaces()? {
            acc = acc.sum(&o)?;
        }
        Ok(acc)
    }

    pub fn is_direct(&self) -> Result<bool> {
        is_direct_sum(&self.orbit_spaces()?)
    }
}

/// Greedy cyclic decomposition by top index.
///
/// Take the member of largest top index not yet covered (the reduced
/// basis vector with that top, scaled to 1 there), record its orbit, mark
/// the orbit's top indices as covered, repeat. Orbit tops drop by exactly
/// `l` each step, so each generator owns one residue class of top indices
/// mod `l` and at most `l` generators appear.
pub fn nilpotent_decompose(s: &Subspace, spec: &ShiftSpec, l: usize) -> Result<CyclicDecomposition> {
    if l == 0 {
        return Err(Error::ParameterOutOfRange("power must be >= 1".into()));
    }
    let b = backward(spec);
    if !is_invariant(s, &b, l)? {
        return Err(Error::NotInvariant { power: l });
    }
    let tb = s.top_basis();
    let mut covered = vec![false; spec.n()];
    let mut gens = Vec::new();
    for v in tb.iter().rev() {
        let h = v.top_index().expect("nonzero");
        if covered[h] {
            continue;
        }
        let orbit_len = h / l + 1;
        for i in 0..orbit_len {
            covered[h - i * l] = true;
        }
        gens.push(Generator { vector: v.clone(), orbit_len });
    }
    Ok(CyclicDecomposition { l, generators: gens, spec: b })
}

fn terminal(x: &Vector, spec: &ShiftSpec, l: usize) -> Result<Vector> {
    Ok(cyclic_orbit(x, spec, l)?.pop().expect("orbit is nonempty"))
}

/// Decide whether the two orbits are jointly independent by testing only
/// their last nonzero vectors.
pub fn pair_independent(x: &Vector, y: &Vector, spec: &ShiftSpec, l: usize) -> Result<bool> {
    let tx = terminal(x, spec, l)?;
    let ty = terminal(y, spec, l)?;
    Ok(rank(&Matrix::from_row_vectors(&[tx, ty], spec.n())?) == 2)
}

/// Reference decision: rank of the stacked orbits equals their total length.
pub fn pair_independent_bruteforce(x: &Vector, y: &Vector, spec: &ShiftSpec, l: usize) -> Result<bool> {
    let mut rows = cyclic_orbit(x, spec, l)?;
    rows.extend(cyclic_orbit(y, spec, l)?);
    Ok(rank(&Matrix::from_row_vectors(&rows, spec.n())?) == rows.len())
}

/// `[rank(m), rank(m^2), ..., rank(m^N)]` for a nilpotent square `m`.
pub fn rank_profile(m: &Matrix) -> Result<Vec<usize>> {
    let n = m.rows();
    if n != m.cols() {
        return Err(Error::DimensionMismatch { expected: n, found: m.cols() });
    }
    let mut out = Vec::with_capacity(n);
    let mut p = m.clone();
    for j in 1..=n {
        out.push(rank(&p));
        if j < n {
            p = p.mul(m)?;
        }
    }
    if !p.is_zero() {
        return Err(Error::NotNilpotent);
    }
    Ok(out)
}

/// Single Jordan block test: `rank(m^j) = N - j` for `1 <= j <= N`.
pub fn unicellular_rank_test(m: &Matrix) -> Result<bool> {
    let n = m.rows();
    let prof = rank_profile(m)?;
    Ok(prof.iter().enumerate().all(|(i, &r)| r == n - (i + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::int;
    use crate::rng;
    use crate::shifts::matrix_of;
    use crate::weights::WeightFamily;
    use proptest::prelude::*;
    use rand::Rng;

    fn e(n: usize, i: usize) -> Vector {
        Vector::basis(n, i)
    }

    fn bspec(f: WeightFamily, n: usize) -> ShiftSpec {
        ShiftSpec::backward(f, n).unwrap()
    }

    #[test]
    fn invariance_examples() {
        let spec = bspec(WeightFamily::Alternating38, 8);
        assert!(is_invariant(&Subspace::zero(8), &spec, 2).unwrap());
        assert!(is_invariant(&Subspace::coordinate(8, [0, 1, 3]), &spec, 2).unwrap());
        assert!(is_invariant(&Subspace::coordinate(8, [0, 2]), &spec, 3).unwrap());
        assert!(!is_invariant(&Subspace::coordinate(8, [0, 3]), &spec, 2).unwrap());
        assert!(is_invariant(&Subspace::coordinate(7, [0]), &spec, 1).is_err());
    }

    #[test]
    fn orbit_examples() {
        let spec = bspec(WeightFamily::harmonic(), 8);
        assert_eq!(cyclic_orbit(&e(8, 0), &spec, 3).unwrap(), vec![e(8, 0)]);
        let o = cyclic_orbit(&e(8, 5), &spec, 2).unwrap();
        let w = |i| spec.weight(i).clone();
        assert_eq!(o.len(), 3);
        assert_eq!(o[1], e(8, 3).scale(&(w(4) * w(3))));
        assert_eq!(o[2], e(8, 1).scale(&(w(4) * w(3) * w(2) * w(1))));
        assert_eq!(cyclic_orbit(&Vector::zeros(8), &spec, 2), Err(Error::ZeroVector));
    }

    #[test]
    fn decomposition_examples() {
        let spec = bspec(WeightFamily::Donoghue, 8);
        let d = nilpotent_decompose(&Subspace::chain(8, 4), &spec, 1).unwrap();
        assert_eq!(d.generators, vec![Generator { vector: e(8, 4), orbit_len: 5 }]);

        let s = Subspace::coordinate(8, [0, 1, 3]);
        let d = nilpotent_decompose(&s, &spec, 2).unwrap();
        assert_eq!(
            d.generators,
            vec![Generator { vector: e(8, 3), orbit_len: 2 }, Generator { vector: e(8, 0), orbit_len: 1 }]
        );
        assert!(d.is_direct().unwrap());
        assert_eq!(d.recompose().unwrap(), s);
        assert_eq!(d.chain_bound(), 3);

        let d = nilpotent_decompose(&Subspace::chain(8, 1), &spec, 2).unwrap();
        assert_eq!(d.orbit_lengths(), vec![1, 1]);

        let bad = Subspace::coordinate(8, [3]);
        assert_eq!(nilpotent_decompose(&bad, &spec, 2), Err(Error::NotInvariant { power: 2 }));
    }

    #[test]
    fn pair_examples() {
        let spec = bspec(WeightFamily::ones(), 6);
        assert!(pair_independent(&e(6, 4), &e(6, 5), &spec, 2).unwrap());
        assert!(pair_independent_bruteforce(&e(6, 4), &e(6, 5), &spec, 2).unwrap());
        let y = e(6, 4).scale(&int(2));
        assert!(!pair_independent(&e(6, 4), &y, &spec, 2).unwrap());
        assert!(pair_independent(&Vector::zeros(6), &y, &spec, 2).is_err());
    }

    #[test]
    fn unicellular_examples() {
        for f in [WeightFamily::ones(), WeightFamily::Alternating38, WeightFamily::harmonic()] {
            let j = matrix_of(&bspec(f, 8), 1).unwrap();
            assert!(unicellular_rank_test(&j).unwrap());
            let j2 = j.pow(2).unwrap();
            assert!(!unicellular_rank_test(&j2).unwrap());
            assert_eq!(rank_profile(&j2).unwrap()[0], 6);
        }
        // Two Jordan blocks of sizes 2 and 2.
        let m = Matrix::from_ints(&[&[0, 1, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]]).unwrap();
        assert!(!unicellular_rank_test(&m).unwrap());
        assert_eq!(unicellular_rank_test(&Matrix::identity(3)), Err(Error::NotNilpotent));
    }

    proptest! {
        #[test]
        fn orbit_length_and_independence(seed in any::<u64>(), l in 1usize..4, n in 1usize..13) {
            let mut r = rng::from_seed(seed);
            let top = r.gen_range(0..n);
            let x = rng::vector_with_top(&mut r, n, top, 0.4);
            let spec = bspec(WeightFamily::Alternating38, n);
            let o = cyclic_orbit(&x, &spec, l).unwrap();
            prop_assert_eq!(o.len(), top / l + 1);
            prop_assert_eq!(rank(&Matrix::from_row_vectors(&o, n).unwrap()), o.len());
        }

        #[test]
        fn decomposition_of_closures(seed in any::<u64>(), l in 1usize..4, n in 2usize..14, k in 1usize..4) {
            let mut r = rng::from_seed(seed);
            let spec = bspec(WeightFamily::harmonic(), n);
            let vs: Vec<Vector> = (0..k).map(|_| {
                let top = r.gen_range(0..n);
                rng::vector_with_top(&mut r, n, top, 0.5)
            }).collect();
            let s = invariant_closure(&vs, &spec, l).unwrap();
            prop_assert!(is_invariant(&s, &spec, l).unwrap());
            let d = nilpotent_decompose(&s, &spec, l).unwrap();
            prop_assert!(d.generator_count() <= l);
            prop_assert!(d.is_direct().unwrap());
            prop_assert_eq!(d.recompose().unwrap(), s.clone());
            prop_assert_eq!(d.orbit_lengths().iter().sum::<usize>(), s.dim());
            // Containment in M_{dim*l - 1}.
            if let Some(top) = s.top_indices().last() {
                prop_assert!(*top < s.dim() * l);
            }
        }

        #[test]
        fn pair_shortcut_matches_rank(seed in any::<u64>(), l in 2usize..4, n in 1usize..13) {
            let mut r = rng::from_seed(seed);
            let spec = bspec(WeightFamily::Donoghue, n);
            let tx = r.gen_range(0..n);
            let ty = r.gen_range(0..n);
            let x = rng::vector_with_top(&mut r, n, tx, 0.6);
            let y = rng::vector_with_top(&mut r, n, ty, 0.6);
            prop_assert_eq!(
                pair_independent(&x, &y, &spec, l).unwrap(),
                pair_independent_bruteforce(&x, &y, &spec, l).unwrap()
            );
        }
    }
}
