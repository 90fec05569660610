//! Exact arithmetic in real algebraic number fields Q(lambda) with a
//! distinguished real embedding.
//!
//! A field is presented by a monic irreducible integer polynomial together
//! with a rational interval isolating one of its real roots; that root is
//! the designated embedding (for Perron-Frobenius data, the dominant root).
//! Comparisons and floors are decided exactly by Sturm sequences and
//! interval refinement, never by floating point.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::exactnum::{big, BigRational, IntPoly};

// ---------------------------------------------------------------------------
// Rational polynomials and Sturm sequences
// ---------------------------------------------------------------------------

/// Rational polynomial, ascending coefficients, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        RatPoly { coeffs: vec![BigRational::one()] }
    }

    pub fn from_int(p: &IntPoly) -> Self {
        RatPoly::new(p.coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> RatPoly {
        if self.coeffs.len() <= 1 {
            return RatPoly::zero();
        }
        RatPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * BigRational::from_integer(big((i + 1) as i64)))
                .collect(),
        )
    }

    pub fn neg(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    pub fn scale(&self, s: &BigRational) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Euclidean division: self = q * div + r with deg r < deg div.
    pub fn div_rem(&self, div: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!div.is_zero(), "polynomial division by zero");
        let mut rem = self.coeffs.clone();
        let dd = div.degree();
        let lead = div.leading();
        if rem.len() <= dd {
            return (RatPoly::zero(), RatPoly::new(rem));
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = &rem[i] / &lead;
            if c.is_zero() {
                continue;
            }
            quot[i - dd] = c.clone();
            for j in 0..=dd {
                let t = &div.coeffs[j] * &c;
                rem[i - dd + j] -= t;
            }
        }
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    pub fn rem(&self, div: &RatPoly) -> RatPoly {
        self.div_rem(div).1
    }

    /// Sturm chain: p, p', then negated remainders.
    pub fn sturm_chain(&self) -> Vec<RatPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let k = chain.len();
            if chain[k - 1].is_zero() {
                chain.pop();
                return chain;
            }
            let r = chain[k - 2].rem(&chain[k - 1]).neg();
            if r.is_zero() {
                return chain;
            }
            chain.push(r);
        }
    }

    /// Number of distinct real roots in the open interval (lo, hi).
    /// Endpoints must not be roots.
    pub fn count_roots_between(
        chain: &[RatPoly],
        lo: &BigRational,
        hi: &BigRational,
    ) -> usize {
        let v = |x: &BigRational| {
            let mut signs = vec![];
            for p in chain {
                let s = sign_rat(&p.eval(x));
                if s != 0 {
                    signs.push(s);
                }
            }
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        v(lo).saturating_sub(v(hi))
    }

    /// Cauchy bound: every real root lies in (-b, b).
    pub fn root_bound(&self) -> BigRational {
        let lead = self.leading();
        let mut m = BigRational::zero();
        for c in &self.coeffs[..self.coeffs.len().saturating_sub(1)] {
            let q = (c / &lead).abs();
            if q > m {
                m = q;
            }
        }
        m + BigRational::one() + BigRational::one()
    }

    /// Squarefree part p / gcd(p, p').
    pub fn squarefree_part(&self) -> RatPoly {
        let g = poly_gcd(self, &self.derivative());
        if g.degree() == 0 {
            return self.clone();
        }
        let (q, _) = self.div_rem(&g);
        q
    }
}

pub fn sign_rat(x: &BigRational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Monic gcd over Q\[t\].
pub fn poly_gcd(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    if a.is_zero() {
        return a;
    }
    let lead = a.leading();
    a.scale(&(BigRational::one() / lead))
}

/// Extended Euclid: returns (g, s, t) monic-normalized with s*a + t*b = g.
fn poly_xgcd(a: &RatPoly, b: &RatPoly) -> (RatPoly, RatPoly, RatPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (RatPoly::one(), RatPoly::zero());
    let (mut t0, mut t1) = (RatPoly::zero(), RatPoly::one());
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        let s = s0.sub(&q.mul(&s1));
        let t = t0.sub(&q.mul(&t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    let lead = r0.leading();
    let inv = BigRational::one() / lead;
    (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
}

// ---------------------------------------------------------------------------
// Rational interval arithmetic (for sign determination under the embedding)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
struct RatInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RatInterval {
    fn point(x: BigRational) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    fn add(&self, other: &RatInterval) -> RatInterval {
        RatInterval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    fn mul(&self, other: &RatInterval) -> RatInterval {
        let c: Vec<BigRational> = vec![
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }
}

fn interval_eval(coeffs: &[BigRational], iv: &RatInterval) -> RatInterval {
    let mut acc = RatInterval::point(BigRational::zero());
    for c in coeffs.iter().rev() {
        acc = acc.mul(iv).add(&RatInterval::point(c.clone()));
    }
    acc
}

// ---------------------------------------------------------------------------
// Integer polynomial factorization (desk scale: full up to degree 4)
// ---------------------------------------------------------------------------

/// Exact division of integer polys when the divisor is monic.
fn int_div_exact(p: &IntPoly, div: &IntPoly) -> Option<IntPoly> {
    debug_assert!(div.is_monic());
    let mut rem: Vec<BigInt> = p.coeffs().to_vec();
    let dd = div.degree();
    if rem.len() <= dd {
        return None;
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        quot[i - dd] = c.clone();
        for j in 0..=dd {
            let t = &div.coeffs()[j] * &c;
            rem[i - dd + j] -= t;
        }
    }
    if rem.iter().all(|c| c.is_zero()) {
        Some(IntPoly::new(quot))
    } else {
        None
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = vec![];
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let q = &n / &d;
            if q != d {
                out.push(q);
            }
        }
        d += 1;
    }
    out.sort();
    out
}

/// Integer roots of a monic integer polynomial (each listed once).
fn integer_roots(p: &IntPoly) -> Vec<BigInt> {
    let mut roots = vec![];
    if p.is_zero() || p.degree() == 0 {
        return roots;
    }
    if p.coeff(0).is_zero() {
        roots.push(BigInt::zero());
    }
    let c0 = p.coeff(0);
    if !c0.is_zero() {
        for d in divisors(&c0) {
            for cand in [d.clone(), -d] {
                if p.eval_int(&cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    roots
}

/// Try to split a monic quartic into two monic integer quadratics.
fn quartic_quadratic_split(p: &IntPoly) -> Option<(IntPoly, IntPoly)> {
    debug_assert_eq!(p.degree(), 4);
    debug_assert!(p.is_monic());
    let c0 = p.coeff(0);
    let c1 = p.coeff(1);
    let c2 = p.coeff(2);
    let c3 = p.coeff(3);
    let mut b_cands: Vec<BigInt> = vec![];
    if c0.is_zero() {
        // A root at 0 would have been peeled already; still, handle it.
        b_cands.push(BigInt::zero());
    } else {
        for d in divisors(&c0) {
            b_cands.push(d.clone());
            b_cands.push(-d);
        }
    }
    for b in &b_cands {
        if b.is_zero() && !c0.is_zero() {
            continue;
        }
        let e = if b.is_zero() { BigInt::zero() } else { &c0 / b };
        // (t^2 + a t + b)(t^2 + c t + e): a + c = c3, b + e + a c = c2,
        // a e + b c = c1.
        let s = &c3;
        let prod = &c2 - b - &e;
        let disc = s * s - big(4) * &prod;
        if disc.is_negative() {
            continue;
        }
        let r = disc.sqrt();
        if &r * &r != disc {
            continue;
        }
        for a_num in [s + &r, s - &r] {
            if (&a_num % big(2)).is_zero() {
                let a = a_num / big(2);
                let c = s - &a;
                if &a * &e + b * &c == c1 {
                    let f1 = IntPoly::new(vec![b.clone(), a.clone(), BigInt::one()]);
                    let f2 = IntPoly::new(vec![e.clone(), c.clone(), BigInt::one()]);
                    return Some((f1, f2));
                }
            }
        }
    }
    None
}

/// Factor a monic integer polynomial into monic irreducible factors.
///
/// Complete for degree <= 4 after integer-root peeling; a leftover factor of
/// degree >= 5 is returned as-is with `fully_factored = false`.
pub fn factor_monic(p: &IntPoly) -> (Vec<IntPoly>, bool) {
    assert!(p.is_monic(), "factor_monic expects a monic polynomial");
    let mut factors = vec![];
    let mut rest = p.clone();
    loop {
        if rest.degree() == 0 {
            return (factors, true);
        }
        let roots = integer_roots(&rest);
        if let Some(r) = roots.first() {
            let lin = IntPoly::new(vec![-r, BigInt::one()]);
            rest = int_div_exact(&rest, &lin).expect("root division is exact");
            factors.push(lin);
            continue;
        }
        match rest.degree() {
            1 => {
                factors.push(rest);
                return (factors, true);
            }
            2 | 3 => {
                // No rational root and degree <= 3: irreducible.
                factors.push(rest);
                return (factors, true);
            }
            4 => match quartic_quadratic_split(&rest) {
                Some((f1, f2)) => {
                    factors.push(f1);
                    factors.push(f2);
                    return (factors, true);
                }
                None => {
                    factors.push(rest);
                    return (factors, true);
                }
            },
            _ => {
                factors.push(rest);
                return (factors, false);
            }
        }
    }
}

/// Irreducibility over Q for monic integer polynomials, complete for
/// degree <= 4. Degree >= 5 returns None ("not decided").
pub fn is_irreducible(p: &IntPoly) -> Option<bool> {
    if !p.is_monic() || p.degree() == 0 {
        return Some(false);
    }
    if p.degree() == 1 {
        return Some(true);
    }
    if !integer_roots(p).is_empty() {
        return Some(false);
    }
    match p.degree() {
        2 | 3 => Some(true),
        4 => Some(quartic_quadratic_split(p).is_none()),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Largest real root location (for Perron-Frobenius data)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum LargestRoot {
    Rational(BigRational),
    /// Isolating interval (open) around an irrational largest real root.
    Isolated(BigRational, BigRational),
    NoRealRoot,
}

/// Locate the largest real root of a monic integer polynomial exactly.
pub fn largest_real_root(p: &IntPoly) -> LargestRoot {
    let rp = RatPoly::from_int(p).squarefree_part();
    let int_roots = integer_roots(p);
    // Strip the integer roots so bisection never lands on a root.
    let mut q = {
        let mut q = p.clone();
        for r in &int_roots {
            let lin = IntPoly::new(vec![-r, BigInt::one()]);
            while let Some(next) = int_div_exact(&q, &lin) {
                q = next;
            }
        }
        RatPoly::from_int(&q).squarefree_part()
    };
    if q.degree() == 0 {
        q = RatPoly::one();
    }
    let best_rational = int_roots.last().cloned().map(BigRational::from_integer);
    let chain = q.sturm_chain();
    let bound = rp.root_bound();
    let mut lo = -&bound;
    let mut hi = bound.clone();
    let irrational = if q.degree() >= 2 && RatPoly::count_roots_between(&chain, &lo, &hi) > 0 {
        // Shrink to an interval holding exactly the largest root of q.
        loop {
            let two = BigRational::from_integer(big(2));
            let mid = (&lo + &hi) / &two;
            let upper = RatPoly::count_roots_between(&chain, &mid, &hi);
            if upper >= 1 {
                lo = mid;
            } else {
                hi = mid;
            }
            if RatPoly::count_roots_between(&chain, &lo, &hi) == 1 && upper <= 1 {
                break;
            }
        }
        Some((lo, hi))
    } else {
        None
    };
    match (best_rational, irrational) {
        (None, None) => LargestRoot::NoRealRoot,
        (Some(r), None) => LargestRoot::Rational(r),
        (None, Some((lo, hi))) => LargestRoot::Isolated(lo, hi),
        (Some(r), Some((mut lo, mut hi))) => {
            // Refine until the interval separates from the rational root.
            loop {
                if lo > r {
                    return LargestRoot::Isolated(lo, hi);
                }
                if hi < r {
                    return LargestRoot::Rational(r);
                }
                let two = BigRational::from_integer(big(2));
                let mid = (&lo + &hi) / &two;
                if mid == r {
                    // q(r) != 0, so the root differs from r; nudge by
                    // quartering instead.
                    let mid = (&lo + &mid) / &two;
                    if sign_rat(&q.eval(&lo)) != sign_rat(&q.eval(&mid)) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                    continue;
                }
                if sign_rat(&q.eval(&lo)) != sign_rat(&q.eval(&mid)) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// NumberField
// ---------------------------------------------------------------------------

/// A real algebraic number field Q(lambda) with a designated real embedding.
#[derive(Debug)]
pub struct NumberField {
    minpoly: IntPoly,
    degree: usize,
    pf_interval: (BigRational, BigRational),
    irreducibility_verified: bool,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.minpoly == other.minpoly && self.pf_interval == other.pf_interval
    }
}
impl Eq for NumberField {}

impl NumberField {
    /// Build a field from a monic integer polynomial and an isolating
    /// interval for the designated real root.
    ///
    /// Irreducibility is fully verified for degree <= 4; degree >= 5 is
    /// accepted with `irreducibility_verified() == false`.
    pub fn new(
        minpoly: IntPoly,
        interval: (BigRational, BigRational),
    ) -> Result<Arc<NumberField>, Error> {
        if minpoly.is_zero() || !minpoly.is_monic() {
            return Err(Error::Domain("minimal polynomial must be monic".into()));
        }
        let degree = minpoly.degree();
        if degree == 0 {
            return Err(Error::Domain("minimal polynomial must have positive degree".into()));
        }
        let verified = match is_irreducible(&minpoly) {
            Some(true) => true,
            Some(false) => {
                return Err(Error::Domain(format!(
                    "minimal polynomial {} is reducible over Q",
                    minpoly
                )))
            }
            None => false,
        };
        let (lo, hi) = interval;
        if lo >= hi {
            return Err(Error::Domain("isolating interval must be nonempty".into()));
        }
        let rp = RatPoly::from_int(&minpoly);
        if degree >= 2 {
            if rp.eval(&lo).is_zero() || rp.eval(&hi).is_zero() {
                return Err(Error::Domain("isolating interval endpoints must not be roots".into()));
            }
            let chain = rp.sturm_chain();
            if RatPoly::count_roots_between(&chain, &lo, &hi) != 1 {
                return Err(Error::Domain(
                    "interval must isolate exactly one real root of the minimal polynomial".into(),
                ));
            }
        } else {
            // Degree 1: the root is rational and known exactly.
            let root = -rp.coeff(0);
            if root < lo || root > hi {
                return Err(Error::Domain("interval does not contain the rational root".into()));
            }
        }
        Ok(Arc::new(NumberField {
            minpoly,
            degree,
            pf_interval: (lo, hi),
            irreducibility_verified: verified,
        }))
    }

    /// The rational field Q presented with minimal polynomial t.
    pub fn rationals() -> Arc<NumberField> {
        NumberField::new(
            IntPoly::from_i64(&[0, 1]),
            (BigRational::from_integer(big(-1)), BigRational::from_integer(big(1))),
        )
        .expect("Q is a valid field")
    }

    /// Q(sqrt(d)) for squarefree d > 1, embedding sqrt(d) > 0.
    pub fn quadratic(d: &BigInt) -> Result<Arc<NumberField>, Error> {
        if d <= &BigInt::one() {
            return Err(Error::Domain("quadratic field needs d > 1".into()));
        }
        if !crate::exactnum::is_squarefree(d)? {
            return Err(Error::Domain(format!("{} is not squarefree", d)));
        }
        let s = d.sqrt();
        let lo = BigRational::from_integer(s.clone());
        let hi = BigRational::from_integer(s + 1);
        NumberField::new(IntPoly::new(vec![-d.clone(), BigInt::zero(), BigInt::one()]), (lo, hi))
    }

    pub fn minpoly(&self) -> &IntPoly {
        &self.minpoly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn pf_interval(&self) -> &(BigRational, BigRational) {
        &self.pf_interval
    }

    pub fn irreducibility_verified(&self) -> bool {
        self.irreducibility_verified
    }

    /// One bisection step; the root is kept strictly inside.
    fn refine(&self, iv: (BigRational, BigRational)) -> (BigRational, BigRational) {
        let (lo, hi) = iv;
        if self.degree == 1 {
            let root = -RatPoly::from_int(&self.minpoly).coeff(0);
            return (root.clone(), root);
        }
        let two = BigRational::from_integer(big(2));
        let mid = (&lo + &hi) / &two;
        let rp = RatPoly::from_int(&self.minpoly);
        // Irreducible of degree >= 2 has no rational root, so p(mid) != 0.
        if sign_rat(&rp.eval(&lo)) != sign_rat(&rp.eval(&mid)) {
            (lo, mid)
        } else {
            (mid, hi)
        }
    }
}

// ---------------------------------------------------------------------------
// FieldElement
// ---------------------------------------------------------------------------

/// Element of a number field in power-basis coordinates
/// c0 + c1*lambda + ... + c_{n-1}*lambda^{n-1}.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coords: Vec<BigRational>,
}

impl std::fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FieldElement{:?}", self.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>())
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coords == other.coords
    }
}
impl Eq for FieldElement {}

impl FieldElement {
    pub fn from_coords(field: Arc<NumberField>, coords: Vec<BigRational>) -> Result<Self, Error> {
        if coords.len() != field.degree() {
            return Err(Error::Dimension(format!(
                "expected {} coordinates, got {}",
                field.degree(),
                coords.len()
            )));
        }
        Ok(FieldElement { field, coords })
    }

    pub fn from_rational(field: Arc<NumberField>, q: BigRational) -> Self {
        let mut coords = vec![BigRational::zero(); field.degree()];
        coords[0] = q;
        FieldElement { field, coords }
    }

    pub fn from_integer(field: Arc<NumberField>, n: i64) -> Self {
        Self::from_rational(field, BigRational::from_integer(big(n)))
    }

    pub fn zero(field: Arc<NumberField>) -> Self {
        Self::from_rational(field, BigRational::zero())
    }

    pub fn one(field: Arc<NumberField>) -> Self {
        Self::from_rational(field, BigRational::one())
    }

    /// The generator lambda itself.
    pub fn generator(field: Arc<NumberField>) -> Self {
        if field.degree() == 1 {
            let root = -RatPoly::from_int(field.minpoly()).coeff(0);
            return Self::from_rational(field, root);
        }
        let mut coords = vec![BigRational::zero(); field.degree()];
        coords[1] = BigRational::one();
        FieldElement { field, coords }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Some(q) when the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    fn check_same_field(&self, other: &FieldElement) -> Result<(), Error> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(
                "operands live in different number fields".into(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, Error> {
        self.check_same_field(other)?;
        let coords =
            self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Ok(FieldElement { field: self.field.clone(), coords })
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, Error> {
        self.check_same_field(other)?;
        let coords =
            self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect();
        Ok(FieldElement { field: self.field.clone(), coords })
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, s: &BigRational) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, Error> {
        self.check_same_field(other)?;
        let pa = RatPoly::new(self.coords.clone());
        let pb = RatPoly::new(other.coords.clone());
        let prod = pa.mul(&pb).rem(&RatPoly::from_int(self.field.minpoly()));
        let mut coords = prod.coeffs().to_vec();
        coords.resize(self.field.degree(), BigRational::zero());
        Ok(FieldElement { field: self.field.clone(), coords })
    }

    /// Multiplicative inverse via extended Euclid on polynomials.
    pub fn inv(&self) -> Result<FieldElement, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let a = RatPoly::new(self.coords.clone());
        let m = RatPoly::from_int(self.field.minpoly());
        let (g, s, _) = poly_xgcd(&a, &m);
        if g.degree() != 0 {
            return Err(Error::Arithmetic(
                "element shares a factor with the minimal polynomial".into(),
            ));
        }
        let s = s.rem(&m);
        let mut coords = s.coeffs().to_vec();
        coords.resize(self.field.degree(), BigRational::zero());
        Ok(FieldElement { field: self.field.clone(), coords })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, Error> {
        self.check_same_field(other)?;
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, mut k: u64) -> Result<FieldElement, Error> {
        let mut result = FieldElement::one(self.field.clone());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Trace of the multiplication-by-self matrix in the power basis.
    pub fn trace(&self) -> BigRational {
        let n = self.field.degree();
        let m = RatPoly::from_int(self.field.minpoly());
        let mut acc = BigRational::zero();
        let mut cur = RatPoly::new(self.coords.clone());
        // Row j of the multiplication matrix is coords of self * lambda^j.
        acc += cur.coeff(0);
        for j in 1..n {
            // Multiply by lambda and reduce.
            let mut shifted = vec![BigRational::zero()];
            shifted.extend_from_slice(cur.coeffs());
            cur = RatPoly::new(shifted).rem(&m);
            acc += cur.coeff(j);
        }
        acc
    }

    /// Exact sign under the designated embedding: -1, 0 or +1.
    pub fn sign(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        if let Some(q) = self.as_rational() {
            return sign_rat(&q);
        }
        let mut iv = RatInterval {
            lo: self.field.pf_interval().0.clone(),
            hi: self.field.pf_interval().1.clone(),
        };
        loop {
            let v = interval_eval(&self.coords, &iv);
            if v.lo.is_positive() {
                return 1;
            }
            if v.hi.is_negative() {
                return -1;
            }
            let refined = self.field.refine((iv.lo, iv.hi));
            iv = RatInterval { lo: refined.0, hi: refined.1 };
        }
    }

    /// Total order under the embedding; exact, equality decided
    /// algebraically.
    pub fn compare_real(&self, other: &FieldElement) -> Result<std::cmp::Ordering, Error> {
        self.check_same_field(other)?;
        Ok(match self.sub(other)?.sign() {
            0 => std::cmp::Ordering::Equal,
            s if s > 0 => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Less,
        })
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    /// The unique integer f with f <= self < f + 1 under the embedding.
    pub fn floor_real(&self) -> BigInt {
        if let Some(q) = self.as_rational() {
            return q.floor().to_integer();
        }
        // Irrational value: refine until the enclosure pins an integer.
        let mut iv = RatInterval {
            lo: self.field.pf_interval().0.clone(),
            hi: self.field.pf_interval().1.clone(),
        };
        loop {
            let v = interval_eval(&self.coords, &iv);
            let flo = v.lo.floor().to_integer();
            let fhi = v.hi.floor().to_integer();
            if flo == fhi {
                return flo;
            }
            let refined = self.field.refine((iv.lo, iv.hi));
            iv = RatInterval { lo: refined.0, hi: refined.1 };
        }
    }

    /// Fractional part self - floor(self).
    pub fn frac(&self) -> FieldElement {
        let f = BigRational::from_integer(self.floor_real());
        let mut coords = self.coords.clone();
        coords[0] -= f;
        FieldElement { field: self.field.clone(), coords }
    }

    /// A floating approximation, for display only.
    pub fn to_f64(&self) -> f64 {
        let mut iv = RatInterval {
            lo: self.field.pf_interval().0.clone(),
            hi: self.field.pf_interval().1.clone(),
        };
        for _ in 0..80 {
            let refined = self.field.refine((iv.lo, iv.hi));
            iv = RatInterval { lo: refined.0, hi: refined.1 };
        }
        let v = interval_eval(&self.coords, &iv);
        rat_to_f64(&v.lo)
    }
}

pub fn rat_to_f64(q: &BigRational) -> f64 {
    let f = |x: &BigInt| -> f64 {
        let s = x.to_string();
        s.parse::<f64>().unwrap_or(f64::NAN)
    };
    f(q.numer()) / f(q.denom())
}

// ---------------------------------------------------------------------------
// Quadratic surds
// ---------------------------------------------------------------------------

/// a + b*sqrt(d) with rational a, b and squarefree d > 1.
///
/// Construction normalizes square parts of the radicand into b; with b = 0
/// the value is rational and d is kept only as a type tag.
#[derive(Clone, Debug)]
pub struct QuadraticSurd {
    pub d: BigInt,
    pub a: BigRational,
    pub b: BigRational,
}

impl PartialEq for QuadraticSurd {
    fn eq(&self, other: &Self) -> bool {
        if self.b.is_zero() && other.b.is_zero() {
            return self.a == other.a;
        }
        self.a == other.a && self.b == other.b && self.d == other.d
    }
}
impl Eq for QuadraticSurd {}

impl std::fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if !self.a.is_zero() {
            write!(f, "{}", self.a)?;
            if self.b.is_positive() {
                write!(f, "+")?;
            }
        }
        if self.b == BigRational::from_integer(big(-1)) {
            write!(f, "-")?;
        } else if self.b != BigRational::one() {
            write!(f, "{}*", self.b)?;
        }
        write!(f, "sqrt({})", self.d)
    }
}

impl QuadraticSurd {
    pub fn new(d: BigInt, a: BigRational, b: BigRational) -> Result<Self, Error> {
        if d <= BigInt::one() {
            return Err(Error::Domain("quadratic surd needs d > 1".into()));
        }
        let (s, df) = crate::exactnum::extract_square_part(&d)?;
        if df.is_one() {
            // Perfect square: the value is rational.
            return Ok(QuadraticSurd {
                d: big(2),
                a: a + &b * BigRational::from_integer(s),
                b: BigRational::zero(),
            });
        }
        Ok(QuadraticSurd { d: df, a, b: b * BigRational::from_integer(s) })
    }

    pub fn from_rational(q: BigRational) -> Self {
        QuadraticSurd { d: big(2), a: q, b: BigRational::zero() }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn check_compatible(&self, other: &QuadraticSurd) -> Result<BigInt, Error> {
        if self.b.is_zero() {
            return Ok(other.d.clone());
        }
        if other.b.is_zero() {
            return Ok(self.d.clone());
        }
        if self.d != other.d {
            return Err(Error::Usage(format!(
                "mixed radicands sqrt({}) and sqrt({})",
                self.d, other.d
            )));
        }
        Ok(self.d.clone())
    }

    pub fn add(&self, other: &QuadraticSurd) -> Result<QuadraticSurd, Error> {
        let d = self.check_compatible(other)?;
        Ok(QuadraticSurd { d, a: &self.a + &other.a, b: &self.b + &other.b })
    }

    pub fn sub(&self, other: &QuadraticSurd) -> Result<QuadraticSurd, Error> {
        let d = self.check_compatible(other)?;
        Ok(QuadraticSurd { d, a: &self.a - &other.a, b: &self.b - &other.b })
    }

    pub fn neg(&self) -> QuadraticSurd {
        QuadraticSurd { d: self.d.clone(), a: -&self.a, b: -&self.b }
    }

    pub fn mul(&self, other: &QuadraticSurd) -> Result<QuadraticSurd, Error> {
        let d = self.check_compatible(other)?;
        let dd = BigRational::from_integer(d.clone());
        Ok(QuadraticSurd {
            d,
            a: &self.a * &other.a + &self.b * &other.b * dd,
            b: &self.a * &other.b + &self.b * &other.a,
        })
    }

    pub fn inv(&self) -> Result<QuadraticSurd, Error> {
        let dd = BigRational::from_integer(self.d.clone());
        let norm = &self.a * &self.a - &self.b * &self.b * dd;
        if norm.is_zero() {
            if self.a.is_zero() && self.b.is_zero() {
                return Err(Error::DivisionByZero);
            }
            return Err(Error::Arithmetic("zero norm".into()));
        }
        Ok(QuadraticSurd {
            d: self.d.clone(),
            a: &self.a / &norm,
            b: -&self.b / &norm,
        })
    }

    pub fn div(&self, other: &QuadraticSurd) -> Result<QuadraticSurd, Error> {
        self.mul(&other.inv()?)
    }

    pub fn conj(&self) -> QuadraticSurd {
        QuadraticSurd { d: self.d.clone(), a: self.a.clone(), b: -&self.b }
    }

    /// Field norm a^2 - b^2 d.
    pub fn norm(&self) -> BigRational {
        let dd = BigRational::from_integer(self.d.clone());
        &self.a * &self.a - &self.b * &self.b * dd
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn sign(&self) -> i32 {
        let sa = sign_rat(&self.a);
        let sb = sign_rat(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // Signs differ: compare a^2 against b^2 d.
        let dd = BigRational::from_integer(self.d.clone());
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * dd;
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Greater => sa,
            std::cmp::Ordering::Less => sb,
            std::cmp::Ordering::Equal => 0,
        }
    }

    pub fn compare(&self, other: &QuadraticSurd) -> Result<std::cmp::Ordering, Error> {
        let diff = self.sub(other)?;
        Ok(match diff.sign() {
            0 => std::cmp::Ordering::Equal,
            s if s > 0 => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Less,
        })
    }

    /// Exact floor. For b != 0 this goes through the integer square root of
    /// the scaled radicand.
    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return self.a.floor().to_integer();
        }
        // Write the value as (p + sign(b) * sqrt(b^2 d q^2 ... )) / q over a
        // common positive denominator q.
        let q = self.a.denom().lcm(self.b.denom());
        let p = self.a.numer() * (&q / self.a.denom());
        let bn = self.b.numer() * (&q / self.b.denom());
        let rad = &bn * &bn * &self.d;
        let t = rad.sqrt();
        debug_assert!(&t * &t != rad, "radicand must not be a perfect square");
        if bn.is_positive() {
            (p + t).div_floor(&q)
        } else {
            (p - t - BigInt::one()).div_floor(&q)
        }
    }

    pub fn to_f64(&self) -> f64 {
        let d = {
            let s = self.d.to_string();
            s.parse::<f64>().unwrap_or(f64::NAN)
        };
        rat_to_f64(&self.a) + rat_to_f64(&self.b) * d.sqrt()
    }

    /// Coordinates in the given field. The field must contain sqrt(d); that
    /// means either minpoly = t^2 - d, or a general quadratic field whose
    /// discriminant has squarefree part d.
    pub fn to_field_element(&self, field: &Arc<NumberField>) -> Result<FieldElement, Error> {
        if self.b.is_zero() {
            return Ok(FieldElement::from_rational(field.clone(), self.a.clone()));
        }
        let (u, v) = sqrt_d_coords(field, &self.d)?;
        // sqrt(d) = u + v*lambda, so a + b*sqrt(d) = (a + b*u) + (b*v)*lambda.
        let mut coords = vec![BigRational::zero(); field.degree()];
        coords[0] = &self.a + &self.b * u;
        coords[1] = &self.b * v;
        FieldElement::from_coords(field.clone(), coords)
    }

    pub fn from_field_element(x: &FieldElement) -> Result<QuadraticSurd, Error> {
        let field = x.field();
        if let Some(q) = x.as_rational() {
            return Ok(QuadraticSurd::from_rational(q));
        }
        if field.degree() != 2 {
            return Err(Error::Domain(
                "only degree-2 elements convert to quadratic surds".into(),
            ));
        }
        let (d, u, v) = field_sqrt_data(field)?;
        // lambda = u' + v'*sqrt(d) with u' = -p/2, v' = s/2; invert the
        // sqrt_d_coords relation instead of recomputing.
        let _ = (u, v);
        let p = BigRational::from_integer(field.minpoly().coeff(1));
        let two = BigRational::from_integer(big(2));
        let (s, _) = crate::exactnum::extract_square_part(&disc_of(field)?)?;
        let sgn = embedding_sqrt_sign(field)?;
        let lam_a = -&p / &two;
        let lam_b = BigRational::from_integer(s) / &two * BigRational::from_integer(big(sgn as i64));
        // x = c0 + c1*lambda.
        let c0 = &x.coords()[0];
        let c1 = &x.coords()[1];
        Ok(QuadraticSurd { d, a: c0 + c1 * lam_a, b: c1 * lam_b })
    }
}

fn disc_of(field: &Arc<NumberField>) -> Result<BigInt, Error> {
    if field.degree() != 2 {
        return Err(Error::Domain("discriminant helper needs a quadratic field".into()));
    }
    let p = field.minpoly().coeff(1);
    let q = field.minpoly().coeff(0);
    let disc = &p * &p - big(4) * &q;
    if !disc.is_positive() {
        return Err(Error::Domain("quadratic field is not real".into()));
    }
    Ok(disc)
}

/// Whether the designated root is (-p + sqrt(disc))/2 (+1) or the other (-1).
fn embedding_sqrt_sign(field: &Arc<NumberField>) -> Result<i32, Error> {
    let p = field.minpoly().coeff(1);
    // 2*lambda + p has the sign of +-sqrt(disc).
    let two_lambda_plus_p = {
        let lam = FieldElement::generator(field.clone());
        let two = FieldElement::from_integer(field.clone(), 2);
        lam.mul(&two)?
            .add(&FieldElement::from_rational(field.clone(), BigRational::from_integer(p)))?
    };
    let s = two_lambda_plus_p.sign();
    if s == 0 {
        return Err(Error::Arithmetic("degenerate quadratic embedding".into()));
    }
    Ok(s)
}

/// Coordinates (u, v) with sqrt(d) = u + v*lambda in the given field.
fn sqrt_d_coords(
    field: &Arc<NumberField>,
    d: &BigInt,
) -> Result<(BigRational, BigRational), Error> {
    if field.degree() != 2 {
        return Err(Error::Domain(format!(
            "field of degree {} cannot host sqrt({})",
            field.degree(),
            d
        )));
    }
    let disc = disc_of(field)?;
    let (s, df) = crate::exactnum::extract_square_part(&disc)?;
    if &df != d {
        return Err(Error::FieldMismatch(format!(
            "field has squarefree discriminant part {}, surd needs {}",
            df, d
        )));
    }
    // lambda = (-p + e*sqrt(disc))/2 with e the embedding sign and
    // sqrt(disc) = s*sqrt(d), hence sqrt(d) = e*(2*lambda + p)/s.
    let e = embedding_sqrt_sign(field)?;
    let p = BigRational::from_integer(field.minpoly().coeff(1));
    let s = BigRational::from_integer(s);
    let two = BigRational::from_integer(big(2));
    let e_rat = BigRational::from_integer(big(e as i64));
    let u = &e_rat * &p / &s;
    let v = e_rat * two / s;
    Ok((u, v))
}

/// (d, u, v) for a quadratic field: squarefree d plus sqrt(d) coordinates.
fn field_sqrt_data(field: &Arc<NumberField>) -> Result<(BigInt, BigRational, BigRational), Error> {
    let disc = disc_of(field)?;
    let (_, d) = crate::exactnum::extract_square_part(&disc)?;
    let (u, v) = sqrt_d_coords(field, &d)?;
    Ok((d, u, v))
}

/// Squarefree part d of a quadratic field's discriminant.
pub fn quadratic_field_d(field: &Arc<NumberField>) -> Result<BigInt, Error> {
    let disc = disc_of(field)?;
    let (_, d) = crate::exactnum::extract_square_part(&disc)?;
    Ok(d)
}

// ---------------------------------------------------------------------------
// Continued fraction engine for quadratic surds
// ---------------------------------------------------------------------------

/// Result of a regular continued fraction expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CfExpansion {
    /// Rational input: finite digit list (Euclidean algorithm).
    Terminating(Vec<BigInt>),
    /// Quadratic irrational: eventually periodic.
    Periodic { preperiod: Vec<BigInt>, period: Vec<BigInt> },
}

/// A continued-fraction cycle with its purely periodic complete quotients.
#[derive(Clone, Debug)]
pub struct SurdCycle {
    pub preperiod: Vec<BigInt>,
    pub period: Vec<BigInt>,
    /// The complete quotient at each period position; these values are a
    /// similarity-class invariant of quadratic modules (Serret).
    pub period_states: Vec<QuadraticSurd>,
}

impl QuadraticSurd {
    /// Exact regular continued fraction via the (P + sqrt(D))/Q recurrence
    /// with the invariant Q | D - P^2. The period is minimal, detected by
    /// the first repeated (P, Q) state.
    pub fn continued_fraction(&self) -> CfExpansion {
        if self.b.is_zero() {
            let mut digits = vec![];
            let mut num = self.a.numer().clone();
            let mut den = self.a.denom().clone();
            loop {
                let q = num.div_floor(&den);
                digits.push(q.clone());
                let r = num - q * &den;
                if r.is_zero() {
                    return CfExpansion::Terminating(digits);
                }
                num = den;
                den = r;
            }
        }
        let cyc = self.continued_fraction_cycle().expect("irrational surd");
        CfExpansion::Periodic { preperiod: cyc.preperiod, period: cyc.period }
    }

    /// Continued fraction of an irrational surd with the cycle's complete
    /// quotients retained.
    pub fn continued_fraction_cycle(&self) -> Result<SurdCycle, Error> {
        if self.b.is_zero() {
            return Err(Error::Domain("rational numbers have no CF cycle".into()));
        }
        // Normalize to (P + sqrt(D))/Q with positive coefficient of the
        // radical and Q | D - P^2.
        let q_den = self.a.denom().lcm(self.b.denom());
        let mut p = self.a.numer() * (&q_den / self.a.denom());
        let bn = self.b.numer() * (&q_den / self.b.denom());
        let mut d = &bn * &bn * &self.d;
        let mut q = q_den;
        if bn.is_negative() {
            p = -p;
            q = -q;
        }
        if !((&d - &p * &p) % &q).is_zero() {
            let qa = q.abs();
            p *= &qa;
            d *= &qa * &qa;
            q *= qa;
        }
        let mut digits: Vec<BigInt> = vec![];
        let mut seen: Vec<(BigInt, BigInt)> = vec![];
        loop {
            if let Some(idx) = seen.iter().position(|(sp, sq)| sp == &p && sq == &q) {
                let period_states = seen[idx..]
                    .iter()
                    .map(|(sp, sq)| {
                        QuadraticSurd::new(
                            d.clone(),
                            BigRational::new(sp.clone(), sq.clone()),
                            BigRational::new(BigInt::one(), sq.clone()),
                        )
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                return Ok(SurdCycle {
                    preperiod: digits[..idx].to_vec(),
                    period: digits[idx..].to_vec(),
                    period_states,
                });
            }
            seen.push((p.clone(), q.clone()));
            let t = d.sqrt();
            let a = if q.is_positive() {
                (&p + &t).div_floor(&q)
            } else {
                (-&p - &t - BigInt::one()).div_floor(&-&q)
            };
            digits.push(a.clone());
            let p_next = &a * &q - &p;
            let q_next = (&d - &p_next * &p_next) / &q;
            p = p_next;
            q = q_next;
        }
    }
}

/// Cyclic equivalence of two digit sequences (equal as cyclic words).
pub fn cyclically_equivalent(a: &[BigInt], b: &[BigInt]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    (0..a.len()).any(|r| (0..a.len()).all(|i| a[(r + i) % a.len()] == b[i]))
}

/// Lexicographically smallest rotation: a canonical representative of the
/// cyclic class of a digit word.
pub fn canonical_rotation(a: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() {
        return vec![];
    }
    (0..a.len())
        .map(|r| (0..a.len()).map(|i| a[(r + i) % a.len()].clone()).collect::<Vec<_>>())
        .min()
        .unwrap()
}
