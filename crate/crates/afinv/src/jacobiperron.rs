//! The Jacobi-Perron engine: expansion of positive vectors over a number
//! field with exact periodicity detection, convergents, block-matrix
//! products and factorization of nonnegative unimodular matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::exactnum::{big, BigRational, IntMatrix};
use crate::numberfield::FieldElement;
use crate::pfdata::{perron_data, PerronData};

/// One digit of a Jacobi-Perron fraction: the column vector b of the block
/// (0 1; I b), with n-1 nonnegative integer entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JPDigit {
    b: Vec<BigInt>,
}

impl JPDigit {
    pub fn new(b: Vec<BigInt>) -> Result<Self, Error> {
        if b.is_empty() {
            return Err(Error::Usage("a JP digit needs at least one entry".into()));
        }
        if b.iter().any(|x| x.is_negative()) {
            return Err(Error::Domain("JP digits are nonnegative".into()));
        }
        Ok(JPDigit { b })
    }

    pub fn from_i64(b: &[i64]) -> Result<Self, Error> {
        Self::new(b.iter().map(|&x| big(x)).collect())
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.b
    }

    /// The n x n block (0 1; I b).
    pub fn block(&self) -> IntMatrix {
        let n = self.b.len() + 1;
        let mut m = IntMatrix::zero(n, n);
        m.set(0, n - 1, BigInt::one());
        for i in 1..n {
            m.set(i, i - 1, BigInt::one());
            m.set(i, n - 1, self.b[i - 1].clone());
        }
        m
    }
}

/// A (possibly truncated) Jacobi-Perron expansion with its exact states.
#[derive(Clone, Debug)]
pub struct JPExpansion {
    /// n: the fraction expands a vector of n-1 components.
    pub dimension: usize,
    pub digits: Vec<JPDigit>,
    /// (preperiod length, period length) when an exact state repeated.
    pub periodic: Option<(usize, usize)>,
    /// A zero fractional part stopped the expansion (rational data).
    pub terminated: bool,
    /// The exact projective states, one per step, starting with the input.
    pub exact_states: Option<Vec<Vec<FieldElement>>>,
}

impl JPExpansion {
    /// Digit at any index, unrolling the period when one was detected.
    pub fn digit_at(&self, i: usize) -> Option<&JPDigit> {
        if i < self.digits.len() {
            return Some(&self.digits[i]);
        }
        let (pre, per) = self.periodic?;
        Some(&self.digits[pre + (i - pre) % per])
    }

    /// The digits of one full period.
    pub fn period_digits(&self) -> Option<&[JPDigit]> {
        let (pre, per) = self.periodic?;
        Some(&self.digits[pre..pre + per])
    }

    /// The exact state at the start of the period.
    pub fn period_state(&self) -> Option<&Vec<FieldElement>> {
        let (pre, _) = self.periodic?;
        self.exact_states.as_ref()?.get(pre)
    }
}

/// Ratio vector (v2/v1, ..., vn/v1) of a period vector.
pub fn ratios_from_periods(periods: &[FieldElement]) -> Result<Vec<FieldElement>, Error> {
    if periods.len() < 2 {
        return Err(Error::Usage("need at least two periods to form ratios".into()));
    }
    periods[1..].iter().map(|p| p.div(&periods[0])).collect()
}

/// Run the Jacobi-Perron algorithm on a positive vector over K.
///
/// Digit rule: b_i = floor(theta_i); next state
/// ({theta_2}/{theta_1}, ..., {theta_{n-1}}/{theta_1}, 1/{theta_1}).
/// Periodicity is detected on exact projective states, never on digit
/// repetition alone; a zero fractional part {theta_1} terminates the
/// expansion (rational data) instead of failing.
pub fn jp_expand(theta: &[FieldElement], max_steps: usize) -> Result<JPExpansion, Error> {
    if theta.is_empty() {
        return Err(Error::Usage("the input vector must be nonempty".into()));
    }
    if max_steps == 0 {
        return Err(Error::Usage("max_steps must be at least 1".into()));
    }
    let field = theta[0].field().clone();
    for t in theta {
        if t.field() != &field {
            return Err(Error::FieldMismatch("vector components in different fields".into()));
        }
        if t.sign() <= 0 {
            return Err(Error::Domain("Jacobi-Perron input must be strictly positive".into()));
        }
    }
    let m = theta.len();
    let mut states: Vec<Vec<FieldElement>> = vec![theta.to_vec()];
    let mut digits: Vec<JPDigit> = vec![];
    let mut periodic = None;
    let mut terminated = false;
    for _ in 0..max_steps {
        let state = states.last().unwrap().clone();
        let b: Vec<BigInt> = state.iter().map(|t| t.floor_real()).collect();
        digits.push(JPDigit::new(b)?);
        let frac1 = state[0].frac();
        if frac1.is_zero() {
            terminated = true;
            break;
        }
        let inv = frac1.inv()?;
        let mut next = Vec::with_capacity(m);
        for t in &state[1..] {
            next.push(t.frac().mul(&inv)?);
        }
        next.push(inv);
        if let Some(idx) = states.iter().position(|s| s == &next) {
            periodic = Some((idx, states.len() - idx));
            break;
        }
        states.push(next);
    }
    Ok(JPExpansion {
        dimension: m + 1,
        digits,
        periodic,
        terminated,
        exact_states: Some(states),
    })
}

/// Exploratory floating-point expansion. Digits only: a float run can never
/// certify periodicity, so none is ever reported.
pub fn jp_expand_f64(theta: &[f64], max_steps: usize) -> Result<(Vec<JPDigit>, bool), Error> {
    if theta.is_empty() || max_steps == 0 {
        return Err(Error::Usage("need a nonempty vector and at least one step".into()));
    }
    if theta.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::Domain("Jacobi-Perron input must be strictly positive".into()));
    }
    let mut state: Vec<f64> = theta.to_vec();
    let mut digits = vec![];
    let mut terminated = false;
    for _ in 0..max_steps {
        let b: Vec<BigInt> = state.iter().map(|t| big(t.floor() as i64)).collect();
        digits.push(JPDigit::new(b)?);
        let f1 = state[0] - state[0].floor();
        if f1 <= f64::EPSILON {
            terminated = true;
            break;
        }
        let mut next: Vec<f64> =
            state[1..].iter().map(|t| (t - t.floor()) / f1).collect();
        next.push(1.0 / f1);
        state = next;
    }
    Ok((digits, terminated))
}

/// k-th convergent: the ratio vector of the last column of the product of
/// the first k+1 blocks (the delta-seeded base case pushes (0,...,0,1)
/// through the blocks). Needs digit k to exist, unrolling a detected
/// period.
pub fn jp_convergents(e: &JPExpansion, k: usize) -> Result<Vec<BigRational>, Error> {
    let mut prod = IntMatrix::identity(e.dimension);
    for i in 0..=k {
        let d = e
            .digit_at(i)
            .ok_or_else(|| Error::Range(format!("digit {} beyond available expansion", i)))?;
        prod = prod.mul(&d.block())?;
    }
    let n = e.dimension;
    let denom = prod.at(0, n - 1).clone();
    if denom.is_zero() {
        return Err(Error::Arithmetic("convergent denominator vanished".into()));
    }
    Ok((1..n)
        .map(|i| BigRational::new(prod.at(i, n - 1).clone(), denom.clone()))
        .collect())
}

/// Exact product of the blocks (0 1; I b_1) ... (0 1; I b_k).
pub fn jp_matrix_product(digits: &[JPDigit]) -> Result<IntMatrix, Error> {
    if digits.is_empty() {
        return Err(Error::Usage("block product of an empty digit list".into()));
    }
    let n = digits[0].entries().len() + 1;
    let mut prod = IntMatrix::identity(n);
    for d in digits {
        if d.entries().len() + 1 != n {
            return Err(Error::Usage("inconsistent digit dimensions".into()));
        }
        prod = prod.mul(&d.block())?;
    }
    Ok(prod)
}

/// Factor a nonnegative matrix of determinant +-1 into Jacobi-Perron
/// blocks. Complete Euclidean peeling for n = 2; greedy peeling with
/// mandatory round-trip verification for n >= 3 — a failure is an explicit
/// error, never a wrong product.
pub fn jp_factorize(a: &IntMatrix) -> Result<Vec<JPDigit>, Error> {
    if !a.is_square() || a.rows() < 2 {
        return Err(Error::Dimension("factorization needs a square matrix of size >= 2".into()));
    }
    if !a.is_nonnegative() {
        return Err(Error::Domain("factorization needs nonnegative entries".into()));
    }
    let det = a.det_exact()?;
    if det != BigInt::one() && det != big(-1) {
        return Err(Error::NotUnimodular(format!("determinant is {}", det)));
    }
    let n = a.rows();
    let identity = IntMatrix::identity(n);
    if *a == identity {
        return Err(Error::FactorizationNotFound(
            "the identity is the empty block product".into(),
        ));
    }
    let mut m = a.clone();
    let mut digits: Vec<JPDigit> = vec![];
    let entry_sum: BigInt = a.entries().iter().sum();
    let cap = 64 + 4 * n
        + usize::try_from(&entry_sum * big(2))
            .unwrap_or(usize::MAX / 2)
            .min(1_000_000);
    let mut zero_run = 0usize;
    while m != identity {
        if digits.len() > cap {
            return Err(Error::FactorizationNotFound("peeling did not terminate".into()));
        }
        let top = m.row(0);
        if top.iter().all(|x| x.is_zero()) {
            return Err(Error::FactorizationNotFound("zero leading row".into()));
        }
        // Peel A = (0 1; I b) * A': the digit entries are forced (greedily)
        // by keeping A' nonnegative: b_j = min over columns with positive
        // top entry of floor(row_j / row_0).
        let mut b = Vec::with_capacity(n - 1);
        for j in 1..n {
            let mut q: Option<BigInt> = None;
            for c in 0..n {
                if top[c].is_positive() {
                    let cand = m.at(j, c).div_floor(&top[c]);
                    q = Some(match q {
                        None => cand,
                        Some(prev) => prev.min(cand),
                    });
                }
            }
            let q = q.unwrap_or_else(BigInt::zero);
            if q.is_negative() {
                return Err(Error::FactorizationNotFound("negative digit forced".into()));
            }
            b.push(q);
        }
        if b.iter().all(|x| x.is_zero()) {
            zero_run += 1;
            if zero_run > n {
                return Err(Error::FactorizationNotFound(
                    "peeling cycles without progress".into(),
                ));
            }
        } else {
            zero_run = 0;
        }
        let mut next = IntMatrix::zero(n, n);
        for j in 1..n {
            for c in 0..n {
                next.set(j - 1, c, m.at(j, c) - &b[j - 1] * &top[c]);
            }
        }
        for c in 0..n {
            next.set(n - 1, c, top[c].clone());
        }
        if !next.is_nonnegative() {
            return Err(Error::FactorizationNotFound("peeling left negative entries".into()));
        }
        digits.push(JPDigit::new(b)?);
        m = next;
    }
    // Mandatory verification.
    if jp_matrix_product(&digits)? != *a {
        return Err(Error::FactorizationNotFound("round-trip verification failed".into()));
    }
    Ok(digits)
}

/// Cyclic equivalence of digit words.
pub fn digits_cyclically_equivalent(a: &[JPDigit], b: &[JPDigit]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..a.len()).any(|r| (0..a.len()).all(|i| a[(r + i) % a.len()] == b[i]))
}

/// Smallest cyclic repetition unit of a digit word.
fn minimal_cycle(word: &[JPDigit]) -> &[JPDigit] {
    let n = word.len();
    for len in 1..=n {
        if n % len != 0 {
            continue;
        }
        if (0..n).all(|i| word[i] == word[i % len]) {
            return &word[..len];
        }
    }
    word
}

/// Perron-Frobenius data of a period-block product, with the Satz XII
/// consistency check: the exact eigenvector's own expansion must reproduce
/// the given period up to cyclic rotation.
pub fn periodic_jp_eigenvector(period: &[JPDigit]) -> Result<PerronData, Error> {
    let prod = jp_matrix_product(period)?;
    if !prod.is_primitive()? {
        return Err(Error::NotPrimitive("period-block product is not primitive".into()));
    }
    let pd = perron_data(&prod)?;
    let theta = pd.ratio_vector();
    let expansion = jp_expand(&theta, 8 * period.len() + 32)?;
    let Some(detected) = expansion.period_digits() else {
        return Err(Error::Arithmetic(
            "eigenvector expansion did not close up within the step budget".into(),
        ));
    };
    let given = minimal_cycle(period);
    if !digits_cyclically_equivalent(minimal_cycle(detected), given) {
        return Err(Error::Arithmetic(
            "eigenvector expansion does not reproduce the given period".into(),
        ));
    }
    Ok(pd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, IntPoly};
    use crate::numberfield::NumberField;
    use std::sync::Arc;

    fn sqrt2_field() -> Arc<NumberField> {
        NumberField::quadratic(&big(2)).unwrap()
    }

    fn fe(field: &Arc<NumberField>, c: &[(i64, i64)]) -> FieldElement {
        FieldElement::from_coords(field.clone(), c.iter().map(|&(n, d)| rat(n, d)).collect())
            .unwrap()
    }

    #[test]
    fn expansion_of_sqrt2_minus_one() {
        let f = sqrt2_field();
        let theta = fe(&f, &[(-1, 1), (1, 1)]); // sqrt(2) - 1
        let e = jp_expand(&[theta], 50).unwrap();
        assert_eq!(e.dimension, 2);
        assert_eq!(e.periodic, Some((1, 1)));
        assert_eq!(e.digits[0], JPDigit::from_i64(&[0]).unwrap());
        assert_eq!(e.digits[1], JPDigit::from_i64(&[2]).unwrap());
    }

    #[test]
    fn expansion_of_a_rational_terminates() {
        let f = NumberField::rationals();
        let theta = FieldElement::from_rational(f, rat(7, 3));
        let e = jp_expand(&[theta], 50).unwrap();
        assert!(e.terminated);
        assert_eq!(e.periodic, None);
        let ds: Vec<_> = e.digits.iter().map(|d| d.entries()[0].clone()).collect();
        assert_eq!(ds, vec![big(2), big(3)]);
    }

    #[test]
    fn expansion_rejects_nonpositive_input() {
        let f = sqrt2_field();
        let theta = fe(&f, &[(-2, 1), (1, 1)]); // sqrt(2) - 2 < 0
        assert!(matches!(jp_expand(&[theta], 10), Err(Error::Domain(_))));
    }

    #[test]
    fn tribonacci_cube_is_periodic() {
        // A0 = companion of t^3 - t^2 - t - 1; A0^3 is strictly positive.
        let a0 = IntMatrix::from_i64(3, 3, &[1, 1, 1, 1, 0, 0, 0, 1, 0]).unwrap();
        let a3 = a0.pow(3).unwrap();
        assert!(a3.is_positive());
        let pd = perron_data(&a3).unwrap();
        let e = jp_expand(&pd.ratio_vector(), 50).unwrap();
        let (pre, per) = e.periodic.expect("periodic within 50 steps");
        assert_eq!((pre, per), (2, 1));
        assert_eq!(e.digits[pre], JPDigit::from_i64(&[1, 1]).unwrap());
        // The period block fixes the repeated state's direction exactly.
        let state = e.period_state().unwrap();
        let block = jp_matrix_product(e.period_digits().unwrap()).unwrap();
        let field = state[0].field().clone();
        let mut v = vec![FieldElement::one(field.clone())];
        v.extend(state.iter().cloned());
        let image: Vec<FieldElement> = (0..3)
            .map(|i| {
                let mut acc = FieldElement::zero(field.clone());
                for j in 0..3 {
                    let c = FieldElement::from_rational(
                        field.clone(),
                        BigRational::from_integer(block.at(i, j).clone()),
                    );
                    acc = acc.add(&c.mul(&v[j]).unwrap()).unwrap();
                }
                acc
            })
            .collect();
        // image = c * v with c = image[0].
        let c = image[0].clone();
        for i in 0..3 {
            assert_eq!(image[i], c.mul(&v[i]).unwrap());
        }
        // c^3 = lambda of A0^3 (the dilatation is commensurable).
        let lam = pd.lambda();
        assert_eq!(c.pow(3).unwrap(), lam);
    }

    #[test]
    fn convergents_of_sqrt2_minus_one() {
        let f = sqrt2_field();
        let theta = fe(&f, &[(-1, 1), (1, 1)]);
        let e = jp_expand(&[theta], 50).unwrap();
        // Classical convergents 0/1, 1/2, 2/5, 5/12, 12/29.
        let expect = [rat(0, 1), rat(1, 2), rat(2, 5), rat(5, 12), rat(12, 29)];
        for (k, want) in expect.iter().enumerate() {
            let c = jp_convergents(&e, k).unwrap();
            assert_eq!(&c[0], want, "k = {}", k);
        }
        // The base case pushes (0, ..., 0, 1) through a single block: the
        // first convergent is the floor vector over 1.
        let c0 = jp_convergents(&e, 0).unwrap();
        assert_eq!(c0[0], rat(0, 1));
    }

    #[test]
    fn convergents_of_a_terminating_expansion_hit_the_value() {
        let f = NumberField::rationals();
        let theta = FieldElement::from_rational(f, rat(7, 3));
        let e = jp_expand(&[theta], 50).unwrap();
        let last = e.digits.len() - 1;
        let c = jp_convergents(&e, last).unwrap();
        assert_eq!(c[0], rat(7, 3));
        assert!(matches!(jp_convergents(&e, last + 1), Err(Error::Range(_))));
    }

    #[test]
    fn convergent_error_is_nonincreasing() {
        let f = sqrt2_field();
        let theta = fe(&f, &[(-1, 1), (1, 1)]);
        let e = jp_expand(&[theta.clone()], 50).unwrap();
        let abs = |x: FieldElement| if x.sign() >= 0 { x } else { x.neg() };
        let mut last: Option<FieldElement> = None;
        for k in 0..20 {
            let c = jp_convergents(&e, k).unwrap();
            let approx = FieldElement::from_rational(theta.field().clone(), c[0].clone());
            let err = abs(theta.sub(&approx).unwrap());
            if let Some(prev) = &last {
                assert_ne!(err.compare_real(prev).unwrap(), std::cmp::Ordering::Greater);
            }
            last = Some(err);
        }
    }

    #[test]
    fn block_products() {
        let d2 = JPDigit::from_i64(&[2]).unwrap();
        let prod = jp_matrix_product(&[d2.clone(), d2.clone()]).unwrap();
        assert_eq!(prod, IntMatrix::from_i64(2, 2, &[1, 2, 2, 5]).unwrap());
        let single = JPDigit::from_i64(&[3, 1]).unwrap();
        assert_eq!(jp_matrix_product(&[single.clone()]).unwrap(), single.block());
        assert!(jp_matrix_product(&[]).is_err());
        let mixed = [JPDigit::from_i64(&[1]).unwrap(), JPDigit::from_i64(&[1, 2]).unwrap()];
        assert!(matches!(jp_matrix_product(&mixed), Err(Error::Usage(_))));
    }

    #[test]
    fn block_shape_in_dimension_six() {
        // (0 1; I b): top row (0,...,0,1), identity below the diagonal and
        // the digit vector down the last column.
        let digits = [3i64, 1, 4, 1, 5];
        let d = JPDigit::from_i64(&digits).unwrap();
        let b = d.block();
        assert_eq!((b.rows(), b.cols()), (6, 6));
        for c in 0..5 {
            assert_eq!(b.at(0, c), &big(0));
        }
        assert_eq!(b.at(0, 5), &big(1));
        for i in 1..6 {
            for c in 0..5 {
                assert_eq!(b.at(i, c), &big(if c == i - 1 { 1 } else { 0 }));
            }
            assert_eq!(b.at(i, 5), &big(digits[i - 1]));
        }
        // det = (-1)^(n-1).
        assert_eq!(b.det_exact().unwrap(), big(-1));
    }

    #[test]
    fn factorization_round_trips() {
        let cases: Vec<IntMatrix> = vec![
            IntMatrix::from_i64(2, 2, &[1, 2, 2, 5]).unwrap(),
            IntMatrix::from_i64(2, 2, &[0, 1, 1, 0]).unwrap(),
            IntMatrix::from_i64(2, 2, &[5, 2, 2, 1]).unwrap(),
            IntMatrix::from_i64(2, 2, &[5, 1, 4, 1]).unwrap(),
            IntMatrix::from_i64(2, 2, &[1, 1, 1, 0]).unwrap(),
            IntMatrix::from_i64(2, 2, &[2, 1, 1, 1]).unwrap(),
        ];
        for a in cases {
            let digits = jp_factorize(&a).unwrap();
            assert_eq!(jp_matrix_product(&digits).unwrap(), a, "round trip for {:?}", a);
        }
        // The worked inverse pair: (1 2; 2 5) = [2][2].
        let digits = jp_factorize(&IntMatrix::from_i64(2, 2, &[1, 2, 2, 5]).unwrap()).unwrap();
        assert_eq!(digits, vec![JPDigit::from_i64(&[2]).unwrap(); 2]);
        // (0 1; 1 0) is the single block with b = 0.
        let digits = jp_factorize(&IntMatrix::from_i64(2, 2, &[0, 1, 1, 0]).unwrap()).unwrap();
        assert_eq!(digits, vec![JPDigit::from_i64(&[0]).unwrap()]);
    }

    #[test]
    fn factorization_dimension_three() {
        // Products of blocks must round-trip.
        let words: Vec<Vec<JPDigit>> = vec![
            vec![JPDigit::from_i64(&[1, 1]).unwrap()],
            vec![JPDigit::from_i64(&[0, 1]).unwrap(), JPDigit::from_i64(&[2, 3]).unwrap()],
            vec![
                JPDigit::from_i64(&[1, 0]).unwrap(),
                JPDigit::from_i64(&[0, 0]).unwrap(),
                JPDigit::from_i64(&[2, 1]).unwrap(),
            ],
        ];
        for w in words {
            let a = jp_matrix_product(&w).unwrap();
            match jp_factorize(&a) {
                Ok(digits) => {
                    assert_eq!(jp_matrix_product(&digits).unwrap(), a);
                }
                Err(Error::FactorizationNotFound(_)) => {
                    // Explicit failure is acceptable; silence would not be.
                }
                Err(e) => panic!("unexpected error {:?}", e),
            }
        }
    }

    #[test]
    fn factorization_rejects_bad_inputs() {
        let neg = IntMatrix::from_i64(2, 2, &[1, -1, 0, 1]).unwrap();
        assert!(matches!(jp_factorize(&neg), Err(Error::Domain(_))));
        let det2 = IntMatrix::from_i64(2, 2, &[2, 0, 0, 1]).unwrap();
        assert!(matches!(jp_factorize(&det2), Err(Error::NotUnimodular(_))));
        let id = IntMatrix::identity(2);
        assert!(matches!(jp_factorize(&id), Err(Error::FactorizationNotFound(_))));
    }

    #[test]
    fn periodic_eigenvector_golden_cases() {
        // Period [2]: block (0 1; 1 2), lambda = 1 + sqrt(2).
        let pd = periodic_jp_eigenvector(&[JPDigit::from_i64(&[2]).unwrap()]).unwrap();
        assert_eq!(pd.field.minpoly(), &IntPoly::from_i64(&[-1, -2, 1]));
        // Period [1],[4]: product (1 4; 1 5), lambda = 3 + 2 sqrt(2).
        let pd = periodic_jp_eigenvector(&[
            JPDigit::from_i64(&[1]).unwrap(),
            JPDigit::from_i64(&[4]).unwrap(),
        ])
        .unwrap();
        assert_eq!(pd.field.minpoly(), &IntPoly::from_i64(&[1, -6, 1]));
        // The cubic period [(1,1)]: exact eigenvector over the Tribonacci
        // field, A v = lambda v already verified inside perron_data.
        let pd = periodic_jp_eigenvector(&[JPDigit::from_i64(&[1, 1]).unwrap()]).unwrap();
        assert_eq!(pd.field.degree(), 3);
    }

    #[test]
    fn satz_iv_scaling_invariance() {
        // Expanding the ratios of (l1, ..., ln) and (mu*l1, ..., mu*ln)
        // gives literally identical digit sequences.
        let f = sqrt2_field();
        let periods = [
            fe(&f, &[(3, 1), (1, 1)]),
            fe(&f, &[(1, 1), (1, 2)]),
        ];
        let mu = rat(7, 5);
        let scaled: Vec<FieldElement> = periods.iter().map(|p| p.scale(&mu)).collect();
        let t1 = ratios_from_periods(&periods).unwrap();
        let t2 = ratios_from_periods(&scaled).unwrap();
        assert_eq!(t1, t2);
        let e1 = jp_expand(&t1, 30).unwrap();
        let e2 = jp_expand(&t2, 30).unwrap();
        assert_eq!(e1.digits, e2.digits);
        assert_eq!(e1.periodic, e2.periodic);
    }

    #[test]
    fn proportional_module_tails_agree() {
        // Two bases of proportional modules expand with the same tail after
        // dropping bounded prefixes.
        let f = sqrt2_field();
        let sqrt2 = FieldElement::generator(f.clone());
        let one = FieldElement::one(f.clone());
        // Basis {1, sqrt2 - 1} of m and {1 + sqrt2, sqrt2} of the same m
        // (unimodular change), plus a rational rescaling by 3.
        let b1 = [one.clone(), sqrt2.sub(&one).unwrap()];
        let b2 = [one.add(&sqrt2).unwrap().scale(&rat(3, 1)), sqrt2.scale(&rat(3, 1))];
        let t1 = ratios_from_periods(&b1).unwrap();
        let t2 = ratios_from_periods(&b2).unwrap();
        let e1 = jp_expand(&t1, 60).unwrap();
        let e2 = jp_expand(&t2, 60).unwrap();
        // Compare 24 digits of the tails after prefix drops <= 10.
        let window = 24usize;
        let found = (0..=10usize).flat_map(|p1| (0..=10usize).map(move |p2| (p1, p2))).any(
            |(p1, p2)| {
                (0..window).all(|i| {
                    match (e1.digit_at(p1 + i), e2.digit_at(p2 + i)) {
                        (Some(a), Some(b)) => a == b,
                        _ => false,
                    }
                })
            },
        );
        assert!(found, "tails disagree beyond prefix 10");
    }
}
