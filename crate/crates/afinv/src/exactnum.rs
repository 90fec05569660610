//! Arbitrary-precision integers/rationals and exact integer linear algebra.
//!
//! Everything in here is fraction-free or rational-exact: Bareiss elimination
//! for determinants, Faddeev-LeVerrier for characteristic polynomials and a
//! column-style Hermite normal form with its unimodular transform. No
//! floating point anywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type BigRational = num_rational::BigRational;

/// Shorthand for `BigInt::from` in expression position.
pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Shorthand for building a reduced rational from machine integers.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(big(num), big(den))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(big(n))
}

/// Dense integer matrix, row-major, arbitrary-precision entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl std::fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IntMatrix[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.at(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, Error> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("matrix must have positive dimensions".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                entries.len()
            )));
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Result<Self, Error> {
        Self::new(rows, cols, entries.iter().map(|&e| big(e)).collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> Vec<BigInt> {
        (0..self.cols).map(|c| self.at(r, c).clone()).collect()
    }

    pub fn col(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.at(r, c).clone());
            }
        }
        out
    }

    pub fn trace(&self) -> Result<BigInt, Error> {
        if !self.is_square() {
            return Err(Error::Dimension("trace requires a square matrix".into()));
        }
        Ok((0..self.rows).fold(BigInt::zero(), |acc, i| acc + self.at(i, i)))
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, Error> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = BigInt::zero();
                for k in 0..self.cols {
                    acc += self.at(r, k) * other.at(k, c);
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, Error> {
        if v.len() != self.cols {
            return Err(Error::Dimension("vector length does not match matrix columns".into()));
        }
        Ok((0..self.rows)
            .map(|r| (0..self.cols).fold(BigInt::zero(), |acc, c| acc + self.at(r, c) * &v[c]))
            .collect())
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigInt]) -> Result<Vec<BigInt>, Error> {
        if v.len() != self.rows {
            return Err(Error::Dimension("vector length does not match matrix rows".into()));
        }
        Ok((0..self.cols)
            .map(|c| (0..self.rows).fold(BigInt::zero(), |acc, r| acc + &v[r] * self.at(r, c)))
            .collect())
    }

    pub fn pow(&self, mut k: u64) -> Result<IntMatrix, Error> {
        if !self.is_square() {
            return Err(Error::Dimension("matrix power requires a square matrix".into()));
        }
        let mut result = IntMatrix::identity(self.rows);
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

    pub fn neg(&self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|e| !e.is_negative())
    }

    pub fn is_positive(&self) -> bool {
        self.entries.iter().all(|e| e.is_positive())
    }

    /// Exact determinant by fraction-free Bareiss elimination.
    pub fn det_exact(&self) -> Result<BigInt, Error> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant requires a square matrix".into()));
        }
        let n = self.rows;
        let mut m: Vec<Vec<BigInt>> = (0..n).map(|r| self.row(r)).collect();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n.saturating_sub(1) {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    // Bareiss: division by the previous pivot is exact.
                    m[i][j] = num / &prev;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        let det = m[n - 1][n - 1].clone();
        Ok(if sign < 0 { -det } else { det })
    }

    /// Monic characteristic polynomial det(tI - A), ascending coefficients.
    ///
    /// Faddeev-LeVerrier over the rationals; the result is checked to be
    /// integral before returning.
    pub fn charpoly(&self) -> Result<IntPoly, Error> {
        if !self.is_square() {
            return Err(Error::Dimension("characteristic polynomial requires a square matrix".into()));
        }
        let n = self.rows;
        let a: Vec<Vec<BigRational>> = (0..n)
            .map(|r| (0..n).map(|c| BigRational::from_integer(self.at(r, c).clone())).collect())
            .collect();
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[n] = BigRational::one();
        // m starts as the identity; iterate m <- a*m + c_k I.
        let mut m: Vec<Vec<BigRational>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| if r == c { BigRational::one() } else { BigRational::zero() })
                    .collect()
            })
            .collect();
        for k in 1..=n {
            let mut am = vec![vec![BigRational::zero(); n]; n];
            for r in 0..n {
                for c in 0..n {
                    let mut acc = BigRational::zero();
                    for j in 0..n {
                        acc += &a[r][j] * &m[j][c];
                    }
                    am[r][c] = acc;
                }
            }
            let tr: BigRational = (0..n).fold(BigRational::zero(), |acc, i| acc + &am[i][i]);
            let ck = -tr / BigRational::from_integer(big(k as i64));
            for r in 0..n {
                for c in 0..n {
                    m[r][c] = am[r][c].clone();
                    if r == c {
                        m[r][c] += &ck;
                    }
                }
            }
            coeffs[n - k] = ck;
        }
        let mut out = Vec::with_capacity(n + 1);
        for c in &coeffs {
            if !c.denom().is_one() {
                return Err(Error::Arithmetic(
                    "characteristic polynomial came out non-integral".into(),
                ));
            }
            out.push(c.numer().clone());
        }
        Ok(IntPoly::new(out))
    }

    /// Column-style Hermite normal form together with the unimodular
    /// transform: returns (H, U) with `self * U = H` and det U = +-1.
    ///
    /// Convention: lower-triangular staircase, positive pivots, entries in a
    /// pivot row left of the pivot reduced into [0, pivot). Zero columns are
    /// pushed to the right. hnf(hnf(m)) = hnf(m).
    pub fn hnf(&self) -> (IntMatrix, IntMatrix) {
        let mut h = self.clone();
        let mut u = IntMatrix::identity(self.cols);
        let mut pivot_col = 0usize;
        for r in 0..self.rows {
            if pivot_col >= self.cols {
                break;
            }
            if (pivot_col..self.cols).all(|j| h.at(r, j).is_zero()) {
                continue;
            }
            // Gather the gcd of row r into the pivot column with unimodular
            // column combinations.
            for j in pivot_col + 1..self.cols {
                if h.at(r, j).is_zero() {
                    continue;
                }
                if h.at(r, pivot_col).is_zero() {
                    h.swap_cols(pivot_col, j);
                    u.swap_cols(pivot_col, j);
                    continue;
                }
                let a = h.at(r, pivot_col).clone();
                let b = h.at(r, j).clone();
                let eg = a.extended_gcd(&b);
                let (g, x, y) = (eg.gcd, eg.x, eg.y);
                let a_g = &a / &g;
                let b_g = &b / &g;
                h.combine_cols(pivot_col, j, &x, &y, &(-&b_g), &a_g);
                u.combine_cols(pivot_col, j, &x, &y, &(-b_g), &a_g);
            }
            if h.at(r, pivot_col).is_negative() {
                h.negate_col(pivot_col);
                u.negate_col(pivot_col);
            }
            // Reduce earlier pivot columns against this pivot.
            let p = h.at(r, pivot_col).clone();
            for j in 0..pivot_col {
                let q = h.at(r, j).div_floor(&p);
                if !q.is_zero() {
                    h.sub_col_multiple(j, pivot_col, &q);
                    u.sub_col_multiple(j, pivot_col, &q);
                }
            }
            pivot_col += 1;
        }
        (h, u)
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = -self.at(r, c);
            self.set(r, c, v);
        }
    }

    /// (col_a, col_b) <- (x*col_a + y*col_b, z*col_a + w*col_b).
    fn combine_cols(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, z: &BigInt, w: &BigInt) {
        for r in 0..self.rows {
            let va = self.at(r, a).clone();
            let vb = self.at(r, b).clone();
            self.set(r, a, x * &va + y * &vb);
            self.set(r, b, z * va + w * vb);
        }
    }

    fn sub_col_multiple(&mut self, target: usize, source: usize, q: &BigInt) {
        for r in 0..self.rows {
            let v = self.at(r, target) - q * self.at(r, source);
            self.set(r, target, v);
        }
    }

    /// Wielandt-bounded primitivity test: some power A^k with k <= n^2 is
    /// strictly positive.
    pub fn is_primitive(&self) -> Result<bool, Error> {
        if !self.is_square() {
            return Err(Error::Dimension("primitivity requires a square matrix".into()));
        }
        if !self.is_nonnegative() {
            return Ok(false);
        }
        let n = self.rows;
        // Work on the boolean support to keep powers small.
        let mut reach: Vec<Vec<bool>> =
            (0..n).map(|r| (0..n).map(|c| !self.at(r, c).is_zero()).collect()).collect();
        let step: Vec<Vec<bool>> = reach.clone();
        if reach.iter().all(|row| row.iter().all(|&b| b)) {
            return Ok(true);
        }
        for _ in 1..n * n {
            let mut next = vec![vec![false; n]; n];
            for r in 0..n {
                for c in 0..n {
                    next[r][c] = (0..n).any(|k| reach[r][k] && step[k][c]);
                }
            }
            reach = next;
            if reach.iter().all(|row| row.iter().all(|&b| b)) {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Integer polynomial, ascending coefficients, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl std::fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self)
    }
}

impl std::fmt::Display for IntPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if i == 0 || !mag.is_one() {
                write!(f, "{}", mag)?;
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            if i == 1 {
                write!(f, "t")?;
            } else if i > 1 {
                write!(f, "t^{}", i)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| big(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rat(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Evaluate at a square matrix (Cayley-Hamilton cross-check).
    pub fn eval_matrix(&self, m: &IntMatrix) -> Result<IntMatrix, Error> {
        if !m.is_square() {
            return Err(Error::Dimension("polynomial evaluation requires a square matrix".into()));
        }
        let n = m.rows();
        let mut acc = IntMatrix::zero(n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m)?;
            for i in 0..n {
                let v = acc.at(i, i) + c;
                acc.set(i, i, v);
            }
        }
        Ok(acc)
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(len);
        for i in 0..len {
            out.push(self.coeff(i) - other.coeff(i));
        }
        IntPoly::new(out)
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * big((i + 1) as i64))
                .collect(),
        )
    }
}

/// Floor of (a/b) for exact integers, b != 0.
pub fn div_floor(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

/// Largest square divisor: returns (s, d) with n = s^2 * d and d squarefree.
///
/// Trial division up to 10^6; a remaining cofactor that is a perfect square
/// is extracted, a cofactor below 10^12 is provably squarefree, anything
/// bigger fails explicitly rather than guessing.
pub fn extract_square_part(n: &BigInt) -> Result<(BigInt, BigInt), Error> {
    if !n.is_positive() {
        return Err(Error::Domain("square part extraction expects a positive integer".into()));
    }
    let mut s = BigInt::one();
    let mut d = BigInt::one();
    let mut m = n.clone();
    let bound = big(1_000_000);
    let mut p = big(2);
    while &p * &p <= m && p <= bound {
        if (&m % &p).is_zero() {
            let mut e = 0u32;
            while (&m % &p).is_zero() {
                m /= &p;
                e += 1;
            }
            for _ in 0..e / 2 {
                s *= &p;
            }
            if e % 2 == 1 {
                d *= &p;
            }
        }
        p += if p == big(2) { big(1) } else { big(2) };
    }
    if m.is_one() {
        return Ok((s, d));
    }
    let r = m.sqrt();
    if &r * &r == m {
        return Ok((s * r, d));
    }
    if m < big(1_000_000_000_000) {
        // All prime factors exceed 10^6, so at most one fits below 10^12.
        return Ok((s, d * m));
    }
    Err(Error::Domain(format!(
        "cannot certify the squarefree part of {}: cofactor {} exceeds the trial-division bound",
        n, m
    )))
}

/// True when n > 1 and squarefree (certified by `extract_square_part`).
pub fn is_squarefree(n: &BigInt) -> Result<bool, Error> {
    let (s, _) = extract_square_part(n)?;
    Ok(s.is_one())
}
