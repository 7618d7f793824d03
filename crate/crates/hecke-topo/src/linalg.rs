//! Exact dense linear algebra over `Q` and over quadratic extensions
//! `Q(√d)`: reduced row echelon form, kernels, characteristic polynomials via
//! the Faddeev–LeVerrier recursion, integer Smith normal form with unimodular
//! transforms `U·A·V = D`, and solvability of linear systems over the local
//! ring `Z_(p)`.
//!
//! The Smith-based `Z_(p)` solver is the workhorse for every coboundary test
//! in the crate: an equation system with rational entries is cleared to an
//! integer system row by row (row scaling never changes the solution set),
//! then `x ∈ Z_(p)^n` is decided from the elementary divisors, since the
//! unimodular transforms are invertible over `Z ⊂ Z_(p)`.

use num::{BigInt, Integer, One, Signed, Zero};

use crate::arith::{int_p_valuation, p_valuation, Rat, Valuation};

type Int = BigInt;

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

/// Minimal field interface for the generic matrix routines (`zero`, `one`
/// and `is_zero` come from `num::Zero`/`num::One`). Implemented by `Rat` and
/// by [`Quad`].
pub trait Field: Clone + PartialEq + std::fmt::Debug + Zero + One {
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    /// Division by a nonzero element.
    fn div_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
}

impl Field for Rat {
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
    fn neg_ref(&self) -> Self {
        -self.clone()
    }
}

/// Write `d = m² · d₀` with `d₀` free of square factors of every prime
/// below 1000, returning `(m, d₀)`. Signs stay on `d₀`. For `d = 0` returns
/// `(1, 0)`.
///
/// Stripping square parts keeps `{1, √d₀}` a `Z_(p)`-basis of the p-local
/// maximal order for every prime `p < 1000`, which makes the coordinatewise
/// valuation on [`Quad`] the honest one for all moduli this crate accepts.
pub fn strip_square_factors(d: &Int) -> (Int, Int) {
    if d.is_zero() {
        return (Int::one(), Int::zero());
    }
    let mut m = Int::one();
    let mut rest = d.clone();
    for q in crate::arith::primes_up_to(1000) {
        let q2 = Int::from(q) * Int::from(q);
        loop {
            let (quot, rem) = rest.div_rem(&q2);
            if rem.is_zero() {
                rest = quot;
                m *= Int::from(q);
            } else {
                break;
            }
        }
    }
    (m, rest)
}

/// A scalar `a + b·√d` in a quadratic extension of `Q`.
///
/// `d = 0` encodes a plain rational (then `b = 0`); otherwise `d` is a
/// non-square integer with no square factors of primes below 1000. Two
/// scalars combine when their discriminants agree or either is rational;
/// mixing genuinely different extensions is a programming error and panics.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Quad {
    a: Rat,
    b: Rat,
    d: Int,
}

impl Quad {
    /// Build `a + b√d`, normalizing: square factors of `d` are absorbed
    /// into `b`, `√1 = 1` and `√0 = 0` fold into the rational part, and
    /// `b = 0` forces `d = 0`.
    pub fn new(a: Rat, b: Rat, d: Int) -> Quad {
        if b.is_zero() || d.is_zero() {
            return Quad {
                a,
                b: Rat::zero(),
                d: Int::zero(),
            };
        }
        let (m, d0) = strip_square_factors(&d);
        let b = b * Rat::from_integer(m);
        if d0.is_one() {
            Quad {
                a: a + b,
                b: Rat::zero(),
                d: Int::zero(),
            }
        } else {
            Quad { a, b, d: d0 }
        }
    }

    /// Embed a rational.
    pub fn from_rat(a: Rat) -> Quad {
        Quad {
            a,
            b: Rat::zero(),
            d: Int::zero(),
        }
    }

    /// Embed a machine integer.
    pub fn from_i64(n: i64) -> Quad {
        Quad::from_rat(crate::arith::rat(n))
    }

    /// Rational part (coefficient of 1).
    pub fn ra(&self) -> &Rat {
        &self.a
    }

    /// Irrational coordinate (coefficient of √d).
    pub fn rb(&self) -> &Rat {
        &self.b
    }

    /// The discriminant under the radical (0 for rationals).
    pub fn disc(&self) -> &Int {
        &self.d
    }

    /// True iff the scalar lies in `Q`.
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// The rational value, if rational.
    pub fn as_rat(&self) -> Option<&Rat> {
        if self.is_rational() {
            Some(&self.a)
        } else {
            None
        }
    }

    /// Galois conjugate `a − b√d`.
    pub fn conj(&self) -> Quad {
        Quad {
            a: self.a.clone(),
            b: -self.b.clone(),
            d: self.d.clone(),
        }
    }

    /// Field norm `a² − d·b²` (a rational).
    pub fn norm(&self) -> Rat {
        &self.a * &self.a - Rat::from_integer(self.d.clone()) * &self.b * &self.b
    }

    /// The common discriminant for an operation with `other`.
    fn unified_disc(&self, other: &Quad) -> Int {
        if self.d.is_zero() {
            other.d.clone()
        } else if other.d.is_zero() || self.d == other.d {
            self.d.clone()
        } else {
            panic!(
                "incompatible quadratic extensions: sqrt({}) vs sqrt({})",
                self.d, other.d
            );
        }
    }

    /// Multiplicative inverse. Panics on 0.
    pub fn inv(&self) -> Quad {
        let n = self.norm();
        assert!(!n.is_zero(), "division by zero in Q(sqrt({}))", self.d);
        let c = self.conj();
        Quad {
            a: c.a / &n,
            b: c.b / &n,
            d: c.d,
        }
    }

    /// Coordinatewise p-adic valuation `min(ν_p(a), ν_p(b))` with respect to
    /// the `{1, √d}` lattice (the p-local maximal order for the discriminants
    /// produced by [`Quad::new`] and every prime below 1000).
    pub fn valuation(&self, p: u64) -> Valuation {
        p_valuation(&self.a, p).min(p_valuation(&self.b, p))
    }

    /// True iff both coordinates lie in `Z_(p)`.
    pub fn is_p_integral(&self, p: u64) -> bool {
        self.valuation(p).is_nonnegative()
    }

    /// Multiply by the rational `s`.
    pub fn scale(&self, s: &Rat) -> Quad {
        Quad {
            a: &self.a * s,
            b: &self.b * s,
            d: self.d.clone(),
        }
    }
}

impl std::fmt::Display for Quad {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt({})", self.b, self.d)
        } else if self.b.is_negative() {
            write!(f, "{} - {}*sqrt({})", self.a, -self.b.clone(), self.d)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

impl std::ops::Add for Quad {
    type Output = Quad;
    fn add(self, o: Quad) -> Quad {
        self.add_ref(&o)
    }
}

impl std::ops::Mul for Quad {
    type Output = Quad;
    fn mul(self, o: Quad) -> Quad {
        self.mul_ref(&o)
    }
}

impl Zero for Quad {
    fn zero() -> Self {
        Quad::from_rat(Rat::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for Quad {
    fn one() -> Self {
        Quad::from_rat(Rat::one())
    }
}

impl Field for Quad {
    fn add_ref(&self, o: &Self) -> Self {
        let d = self.unified_disc(o);
        Quad::new(&self.a + &o.a, &self.b + &o.b, d)
    }
    fn sub_ref(&self, o: &Self) -> Self {
        let d = self.unified_disc(o);
        Quad::new(&self.a - &o.a, &self.b - &o.b, d)
    }
    fn mul_ref(&self, o: &Self) -> Self {
        let d = self.unified_disc(o);
        let dr = Rat::from_integer(d.clone());
        Quad::new(
            &self.a * &o.a + &dr * &self.b * &o.b,
            &self.a * &o.b + &self.b * &o.a,
            d,
        )
    }
    fn div_ref(&self, o: &Self) -> Self {
        self.mul_ref(&o.inv())
    }
    fn neg_ref(&self) -> Self {
        Quad {
            a: -self.a.clone(),
            b: -self.b.clone(),
            d: self.d.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// Dense matrices over a field
// ---------------------------------------------------------------------------

/// Dense row-major matrix over a [`Field`].
#[derive(Clone, PartialEq, Debug)]
pub struct Mat<T: Field> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Mat<T> {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat<T> {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Mat<T> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Mat<T> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Mat<T> {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, o: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "add: shape");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(x, y)| x.add_ref(y))
                .collect(),
        }
    }

    pub fn sub(&self, o: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "sub: shape");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(x, y)| x.sub_ref(y))
                .collect(),
        }
    }

    pub fn neg(&self) -> Mat<T> {
        self.map(|x| x.neg_ref())
    }

    pub fn scalar_mul(&self, s: &T) -> Mat<T> {
        self.map(|x| x.mul_ref(s))
    }

    pub fn mul(&self, o: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, o.rows, "mul: inner dimension");
        let mut out = Mat::<T>::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let t = aik.mul_ref(o.get(k, j));
                    let cur = out.get(i, j).add_ref(&t);
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "apply: dimension");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.cols {
                    acc = acc.add_ref(&self.get(i, j).mul_ref(&v[j]));
                }
                acc
            })
            .collect()
    }

    /// Trace (square matrices).
    pub fn trace(&self) -> T {
        assert_eq!(self.rows, self.cols, "trace: square");
        let mut acc = T::zero();
        for i in 0..self.rows {
            acc = acc.add_ref(self.get(i, i));
        }
        acc
    }

    /// Stack `self` on top of `o` (same column count).
    pub fn vstack(&self, o: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, o.cols, "vstack: column count");
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Mat {
            rows: self.rows + o.rows,
            cols: self.cols,
            data,
        }
    }
}

impl Mat<Rat> {
    /// View a rational matrix inside a quadratic extension.
    pub fn to_quad(&self) -> Mat<Quad> {
        self.map(|x| Quad::from_rat(x.clone()))
    }
}

// ---------------------------------------------------------------------------
// Echelon form, kernels, characteristic polynomial
// ---------------------------------------------------------------------------

/// Reduced row echelon form; returns the echelon matrix and the pivot
/// columns.
pub fn rref<T: Field>(m: &Mat<T>) -> (Mat<T>, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = (a.nrows(), a.ncols());
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        for j in 0..cols {
            let tmp = a.get(r, j).clone();
            a.set(r, j, a.get(pr, j).clone());
            a.set(pr, j, tmp);
        }
        let inv = T::one().div_ref(a.get(r, c));
        for j in 0..cols {
            a.set(r, j, a.get(r, j).mul_ref(&inv));
        }
        for i in 0..rows {
            if i != r && !a.get(i, c).is_zero() {
                let f = a.get(i, c).clone();
                for j in 0..cols {
                    let v = a.get(i, j).sub_ref(&f.mul_ref(a.get(r, j)));
                    a.set(i, j, v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Rank over the coefficient field.
pub fn rank<T: Field>(m: &Mat<T>) -> usize {
    rref(m).1.len()
}

/// Basis of the right kernel `{x : Mx = 0}`, one vector per free column of
/// the echelon form. The basis is in "free variable = 1" normal form.
pub fn kernel_basis<T: Field>(m: &Mat<T>) -> Vec<Vec<T>> {
    let (e, pivots) = rref(m);
    let cols = m.ncols();
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![T::zero(); cols];
        v[free] = T::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = e.get(r, free).neg_ref();
        }
        basis.push(v);
    }
    basis
}

/// Any solution of `Ax = b` over the coefficient field, or `None` if the
/// system is inconsistent. Free variables are set to 0.
pub fn solve<T: Field>(a: &Mat<T>, b: &[T]) -> Option<Vec<T>> {
    assert_eq!(a.nrows(), b.len(), "solve: dimension");
    let aug = Mat::from_fn(a.nrows(), a.ncols() + 1, |i, j| {
        if j < a.ncols() {
            a.get(i, j).clone()
        } else {
            b[i].clone()
        }
    });
    let (e, pivots) = rref(&aug);
    if pivots.contains(&a.ncols()) {
        return None; // pivot in the constants column: inconsistent
    }
    let mut x = vec![T::zero(); a.ncols()];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = e.get(r, a.ncols()).clone();
    }
    Some(x)
}

/// Characteristic polynomial of a square rational matrix by the
/// Faddeev–LeVerrier recursion:
///
/// ```text
///   M_1 = A,   c_k = −tr(M_k)/k,   M_{k+1} = A·(M_k + c_k·I).
/// ```
///
/// Returns the monic coefficient list `[1, c_1, …, c_n]` so that
/// `p(x) = Σ_i coeffs[i]·x^{n−i}`.
pub fn charpoly(a: &Mat<Rat>) -> Vec<Rat> {
    assert_eq!(a.nrows(), a.ncols(), "charpoly: square");
    let n = a.nrows();
    let mut coeffs = vec![Rat::one()];
    let mut mk = a.clone();
    for k in 1..=n {
        let c = -mk.trace() / crate::arith::rat(k as i64);
        coeffs.push(c.clone());
        if k < n {
            let shifted = mk.add(&Mat::<Rat>::identity(n).scalar_mul(&c));
            mk = a.mul(&shifted);
        }
    }
    coeffs
}

// ---------------------------------------------------------------------------
// Integer matrices and Smith normal form
// ---------------------------------------------------------------------------

/// Dense row-major matrix over the integers (for Smith normal form and
/// saturated kernels).
#[derive(Clone, PartialEq, Debug)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> IntMat {
        IntMat {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> IntMat {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Int::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Int) -> IntMat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMat { rows, cols, data }
    }

    pub fn from_rows_i64(rows: &[&[i64]]) -> IntMat {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        IntMat::from_fn(r, c, |i, j| Int::from(rows[i][j]))
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, o: &IntMat) -> IntMat {
        assert_eq!(self.cols, o.rows, "mul: inner dimension");
        let mut out = IntMat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k).clone();
                if aik.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let t = &aik * o.get(k, j);
                    let cur = out.get(i, j) + t;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len(), "apply: dimension");
        (0..self.rows)
            .map(|i| {
                let mut acc = Int::zero();
                for j in 0..self.cols {
                    acc += self.get(i, j) * &v[j];
                }
                acc
            })
            .collect()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row_i ← row_i + q·row_j
    fn add_row_multiple(&mut self, i: usize, j: usize, q: &Int) {
        for c in 0..self.cols {
            let t = self.get(j, c) * q;
            let v = self.get(i, c) + t;
            self.set(i, c, v);
        }
    }

    /// col_i ← col_i + q·col_j
    fn add_col_multiple(&mut self, i: usize, j: usize, q: &Int) {
        for r in 0..self.rows {
            let t = self.get(r, j) * q;
            let v = self.get(r, i) + t;
            self.set(r, i, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -self.get(i, c).clone();
            self.set(i, c, v);
        }
    }
}

/// Smith normal form `U·A·V = D` with `U, V` unimodular and `D` diagonal
/// with `d_1 | d_2 | …`, all `d_i ≥ 0`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub d: IntMat,
    pub u: IntMat,
    pub v: IntMat,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

impl Snf {
    /// The i-th elementary divisor `d_i` (0-based; only `i < rank` nonzero).
    pub fn divisor(&self, i: usize) -> &Int {
        self.d.get(i, i)
    }
}

/// Compute the Smith normal form of `a` by row/column reduction, tracking
/// the unimodular transforms. Pivots are chosen of minimal absolute value to
/// limit entry growth; the divisibility chain `d_i | d_{i+1}` is enforced by
/// the usual row-absorption trick.
pub fn snf(a: &IntMat) -> Snf {
    let (m, n) = (a.nrows(), a.ncols());
    let mut d = a.clone();
    let mut u = IntMat::identity(m);
    let mut v = IntMat::identity(n);

    let mut t = 0usize;
    while t < m.min(n) {
        // Locate a minimal-absolute-value nonzero entry in the submatrix.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !d.get(i, j).is_zero()
                    && pivot
                        .map(|(pi, pj)| d.get(i, j).abs() < d.get(pi, pj).abs())
                        .unwrap_or(true)
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        // Clear row and column t; remainders force re-picking a smaller
        // pivot, so the loop terminates by descent on |pivot|.
        let mut clean = true;
        for i in (t + 1)..m {
            if !d.get(i, t).is_zero() {
                let q = -d.get(i, t).div_floor(d.get(t, t));
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !d.get(i, t).is_zero() {
                    clean = false;
                }
            }
        }
        for j in (t + 1)..n {
            if !d.get(t, j).is_zero() {
                let q = -d.get(t, j).div_floor(d.get(t, t));
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !d.get(t, j).is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue; // re-pick: some remainder is smaller than the pivot
        }

        // Enforce divisibility of the trailing block by the pivot.
        let mut offender: Option<usize> = None;
        'scan: for i in (t + 1)..m {
            for j in (t + 1)..n {
                if !d.get(i, j).mod_floor(d.get(t, t)).is_zero() {
                    offender = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = offender {
            let one = Int::one();
            d.add_row_multiple(t, i, &one);
            u.add_row_multiple(t, i, &one);
            continue; // the new row-t entries reduce the pivot further
        }

        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }

    Snf {
        rank: t,
        d,
        u,
        v,
    }
}

/// Basis of the integer kernel `{x ∈ Z^n : Ax = 0}`, saturated (i.e. a basis
/// of the full kernel lattice): the columns of `V` beyond the rank, since
/// `A·(V e_i) = d_i · (U^{-1} e_i)` vanishes exactly for `d_i = 0`.
pub fn integer_kernel_basis(a: &IntMat) -> Vec<Vec<Int>> {
    let s = snf(a);
    let n = a.ncols();
    (s.rank..n)
        .map(|j| (0..n).map(|i| s.v.get(i, j).clone()).collect())
        .collect()
}

/// Decide `Ax = b` with `x ∈ Z_(p)^n` for a rational system, returning a
/// solution if one exists.
///
/// Each equation is scaled by the LCM of its denominators (a no-op on the
/// solution set), giving an integer system; with `U A V = D` and
/// `y = V^{-1} x`, solvability over `Z_(p)` is exactly
///
/// ```text
///   ν_p((U b)_i) ≥ ν_p(d_i)   for i < rank,      (U b)_i = 0   for i ≥ rank,
/// ```
///
/// because unimodular `U, V` preserve `Z_(p)`-integrality. The returned
/// solution is `x = V y` with `y_i = (U b)_i / d_i` (free coordinates 0) and
/// satisfies `Ax = b` exactly; its entries may have p-free denominators.
pub fn smith_solve_local(a: &Mat<Rat>, b: &[Rat], p: u64) -> Option<Vec<Rat>> {
    assert_eq!(a.nrows(), b.len(), "smith_solve_local: dimension");
    let (m, n) = (a.nrows(), a.ncols());

    // Row-wise denominator clearing (multiplying an equation by a nonzero
    // rational does not change its solution set).
    let mut ai = IntMat::zeros(m, n);
    let mut bi = vec![Int::zero(); m];
    for i in 0..m {
        let mut l = Int::one();
        for j in 0..n {
            l = l.lcm(a.get(i, j).denom());
        }
        l = l.lcm(b[i].denom());
        let lr = Rat::from_integer(l);
        for j in 0..n {
            let scaled = a.get(i, j) * &lr;
            debug_assert!(scaled.is_integer());
            ai.set(i, j, scaled.to_integer());
        }
        let scaled = &b[i] * &lr;
        debug_assert!(scaled.is_integer());
        bi[i] = scaled.to_integer();
    }

    let s = snf(&ai);
    let ub = s.u.apply(&bi);

    let mut y = vec![Rat::zero(); n];
    for (i, ubi) in ub.iter().enumerate() {
        if i < s.rank {
            if ubi.is_zero() {
                continue;
            }
            let di = s.divisor(i);
            if int_p_valuation_big(ubi, p) < int_p_valuation_big(di, p) {
                return None; // p-part of d_i does not divide (Ub)_i
            }
            y[i] = Rat::new(ubi.clone(), di.clone());
        } else if !ubi.is_zero() {
            return None; // inconsistent even over Q
        }
    }

    let x: Vec<Rat> = (0..n)
        .map(|i| {
            let mut acc = Rat::zero();
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    acc += Rat::from_integer(s.v.get(i, j).clone()) * yj;
                }
            }
            acc
        })
        .collect();

    debug_assert!(
        {
            let ax = a.apply(&x);
            ax.iter().zip(b).all(|(l, r)| l == r)
        },
        "smith_solve_local: produced a non-solution"
    );
    debug_assert!(x.iter().all(|xi| crate::arith::is_p_integral(xi, p)));
    Some(x)
}

/// ν_p of a nonzero big integer (helper for the divisor comparisons above).
fn int_p_valuation_big(x: &Int, p: u64) -> i64 {
    debug_assert!(!x.is_zero());
    if let Ok(small) = u64::try_from(x.abs()) {
        return int_p_valuation(small, p);
    }
    let p = Int::from(p);
    let mut x = x.abs();
    let mut v = 0i64;
    loop {
        let (q, r) = x.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}
