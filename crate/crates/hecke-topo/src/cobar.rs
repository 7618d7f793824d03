//! The cobar complex of the truncated Hopf algebroid
//! `(A, Γ) = (Z_(p)[v_1], Z_(p)[v_1][t_1])` with `η_L(v_1) = v_1`,
//! `η_R(v_1) = v_1 + p·t_1`, `Δ(t_1) = t_1⊗1 + 1⊗t_1`, through cohomological
//! degree 2: the α-family cocycles
//!
//! `σ_n = Σ_{i=1}^n C(n,i) p^{i−1−ν_p(n)} v_1^{n−i} t_1^i`,
//!
//! their `Ext¹` orders `p^{1+ν_p(n)}` in internal degree `2n(p−1)`, and the
//! twisted complex of the two-cell pair `A ⊕ Σ^{2n(p−1)}A`, where requiring
//! `(p^j σ_n, 0)` to die forces the twist value `ζ(1) = (p^j σ_n, 0)`.
//!
//! Degree-2 elements are kept in left-normalized form: every `A`-coefficient
//! is moved into the left tensor factor using `γ ⊗ v_1·γ′ = γ·(v_1+p·t_1) ⊗ γ′`
//! (the right factor's left `A`-action is the left factor's right action
//! through `η_R`), so the canonical basis is `{v_1^a t_1^b ⊗ t_1^c}`.

use std::collections::BTreeMap;

use num::{BigInt, One, Zero};

use crate::arith::{binomial, int_p_valuation, is_prime, p_valuation, Rat, Valuation};
use crate::error::Error;
use crate::linalg::{integer_kernel_basis, smith_solve_local, IntMat, Mat};
use crate::Result;

type Int = BigInt;

/// `p^e` as an exact rational, `e` of either sign.
fn p_pow(p: u64, e: i64) -> Rat {
    let abs = Int::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        Rat::from_integer(abs)
    } else {
        Rat::new(Int::one(), abs)
    }
}

fn add_into<K: Ord + Copy>(m: &mut BTreeMap<K, Rat>, k: K, c: &Rat) {
    if c.is_zero() {
        return;
    }
    let v = m.entry(k).or_insert_with(Rat::zero);
    *v += c;
    if v.is_zero() {
        m.remove(&k);
    }
}

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// A homogeneous-degree element of the cobar complex in cohomological
/// degree 0, 1, or 2. Monomial keys: `m ↦ v_1^m` in degree 0,
/// `(a, b) ↦ v_1^a t_1^b` in degree 1, `(a, b, c) ↦ v_1^a t_1^b ⊗ t_1^c`
/// (left-normalized) in degree 2. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CobarElement {
    Deg0(BTreeMap<u64, Rat>),
    Deg1(BTreeMap<(u64, u64), Rat>),
    Deg2(BTreeMap<(u64, u64, u64), Rat>),
}

impl CobarElement {
    pub fn zero(degree: u8) -> CobarElement {
        match degree {
            0 => CobarElement::Deg0(BTreeMap::new()),
            1 => CobarElement::Deg1(BTreeMap::new()),
            2 => CobarElement::Deg2(BTreeMap::new()),
            d => panic!("cobar degree {d} out of range"),
        }
    }

    /// `v_1^m` in degree 0.
    pub fn v_pow(m: u64) -> CobarElement {
        let mut t = BTreeMap::new();
        t.insert(m, Rat::one());
        CobarElement::Deg0(t)
    }

    /// `c · v_1^a t_1^b` in degree 1.
    pub fn deg1_monomial(a: u64, b: u64, c: Rat) -> CobarElement {
        let mut t = BTreeMap::new();
        if !c.is_zero() {
            t.insert((a, b), c);
        }
        CobarElement::Deg1(t)
    }

    pub fn degree(&self) -> u8 {
        match self {
            CobarElement::Deg0(_) => 0,
            CobarElement::Deg1(_) => 1,
            CobarElement::Deg2(_) => 2,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CobarElement::Deg0(t) => t.is_empty(),
            CobarElement::Deg1(t) => t.is_empty(),
            CobarElement::Deg2(t) => t.is_empty(),
        }
    }

    /// Total `(v_1, t_1)`-monomial degree if homogeneous (the internal
    /// topological degree is `2(p−1)` times this), `None` otherwise or for
    /// the zero element.
    pub fn homogeneous_degree(&self) -> Option<u64> {
        let degs: Vec<u64> = match self {
            CobarElement::Deg0(t) => t.keys().copied().collect(),
            CobarElement::Deg1(t) => t.keys().map(|&(a, b)| a + b).collect(),
            CobarElement::Deg2(t) => t.keys().map(|&(a, b, c)| a + b + c).collect(),
        };
        match degs.split_first() {
            Some((&d, rest)) if rest.iter().all(|&e| e == d) => Some(d),
            _ => None,
        }
    }

    pub fn add(&self, other: &CobarElement) -> CobarElement {
        match (self, other) {
            (CobarElement::Deg0(x), CobarElement::Deg0(y)) => {
                let mut t = x.clone();
                for (k, c) in y {
                    add_into(&mut t, *k, c);
                }
                CobarElement::Deg0(t)
            }
            (CobarElement::Deg1(x), CobarElement::Deg1(y)) => {
                let mut t = x.clone();
                for (k, c) in y {
                    add_into(&mut t, *k, c);
                }
                CobarElement::Deg1(t)
            }
            (CobarElement::Deg2(x), CobarElement::Deg2(y)) => {
                let mut t = x.clone();
                for (k, c) in y {
                    add_into(&mut t, *k, c);
                }
                CobarElement::Deg2(t)
            }
            _ => panic!("cobar degree mismatch in add"),
        }
    }

    pub fn scale(&self, s: &Rat) -> CobarElement {
        let scale0 = |t: &BTreeMap<u64, Rat>| {
            t.iter()
                .filter(|_| !s.is_zero())
                .map(|(k, c)| (*k, c * s))
                .collect()
        };
        match self {
            CobarElement::Deg0(t) => CobarElement::Deg0(scale0(t)),
            CobarElement::Deg1(t) => CobarElement::Deg1(
                t.iter()
                    .filter(|_| !s.is_zero())
                    .map(|(k, c)| (*k, c * s))
                    .collect(),
            ),
            CobarElement::Deg2(t) => CobarElement::Deg2(
                t.iter()
                    .filter(|_| !s.is_zero())
                    .map(|(k, c)| (*k, c * s))
                    .collect(),
            ),
        }
    }

    /// All coefficients lie in `Z_(p)`.
    pub fn is_p_integral(&self, p: u64) -> bool {
        let ok = |c: &Rat| p_valuation(c, p).is_nonnegative();
        match self {
            CobarElement::Deg0(t) => t.values().all(ok),
            CobarElement::Deg1(t) => t.values().all(ok),
            CobarElement::Deg2(t) => t.values().all(ok),
        }
    }
}

/// One term `coeff · v_1^{lv} t_1^{lt} ⊗ v_1^{rv} t_1^{rt}` of a raw
/// (not yet normalized) degree-2 tensor.
#[derive(Clone, Debug)]
pub struct RawTensorTerm {
    pub lv: u64,
    pub lt: u64,
    pub rv: u64,
    pub rt: u64,
    pub coeff: Rat,
}

impl RawTensorTerm {
    pub fn new(lv: u64, lt: u64, rv: u64, rt: u64, coeff: Rat) -> RawTensorTerm {
        RawTensorTerm {
            lv,
            lt,
            rv,
            rt,
            coeff,
        }
    }
}

/// Left-normalize a degree-2 tensor: every right-factor power of `v_1`
/// crosses the tensor sign as `η_R(v_1) = v_1 + p·t_1`, i.e.
/// `γ ⊗ v_1^d t_1^c = γ·(v_1 + p t_1)^d ⊗ t_1^c`, leaving the canonical
/// basis `{v_1^a t_1^b ⊗ t_1^c}`.
pub fn normalize(p: u64, terms: &[RawTensorTerm]) -> CobarElement {
    let mut out: BTreeMap<(u64, u64, u64), Rat> = BTreeMap::new();
    for term in terms {
        // (v + pt)^{rv} = Σ_i C(rv, i) p^i v^{rv−i} t^i, multiplied into the
        // left factor
        for i in 0..=term.rv {
            let coeff =
                &term.coeff * Rat::from_integer(binomial(term.rv, i)) * p_pow(p, i as i64);
            add_into(
                &mut out,
                (term.lv + (term.rv - i), term.lt + i, term.rt),
                &coeff,
            );
        }
    }
    CobarElement::Deg2(out)
}

// ---------------------------------------------------------------------------
// Differentials
// ---------------------------------------------------------------------------

/// The cobar differential: `d⁰(a) = η_R(a) − η_L(a)` on degree 0,
/// `d¹(γ) = 1⊗γ − Δ(γ) + γ⊗1` on degree 1 (computed literally from the
/// three cosimplicial terms, then left-normalized).
pub fn cobar_d(p: u64, e: &CobarElement) -> Result<CobarElement> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    match e {
        CobarElement::Deg0(t) => {
            let mut out: BTreeMap<(u64, u64), Rat> = BTreeMap::new();
            for (&m, c) in t {
                // (v + pt)^m − v^m
                for i in 1..=m {
                    let coeff = c * Rat::from_integer(binomial(m, i)) * p_pow(p, i as i64);
                    add_into(&mut out, (m - i, i), &coeff);
                }
            }
            Ok(CobarElement::Deg1(out))
        }
        CobarElement::Deg1(t) => {
            let mut raw: Vec<RawTensorTerm> = Vec::new();
            let mut diag: BTreeMap<(u64, u64, u64), Rat> = BTreeMap::new();
            for (&(a, b), c) in t {
                // 1 ⊗ v^a t^b (right v-powers handled by the normalizer)
                raw.push(RawTensorTerm::new(0, 0, a, b, c.clone()));
                // γ ⊗ 1
                raw.push(RawTensorTerm::new(a, b, 0, 0, c.clone()));
                // −Δ(v^a t^b) = −Σ_j C(b,j) v^a t^j ⊗ t^{b−j}
                for j in 0..=b {
                    let coeff = -(c * Rat::from_integer(binomial(b, j)));
                    add_into(&mut diag, (a, j, b - j), &coeff);
                }
            }
            Ok(normalize(p, &raw).add(&CobarElement::Deg2(diag)))
        }
        CobarElement::Deg2(_) => Err(Error::invalid(
            "the cobar differential is only modeled through degree 1 → 2".to_string(),
        )),
    }
}

// ---------------------------------------------------------------------------
// The α-family cocycle and Ext¹
// ---------------------------------------------------------------------------

fn validate_pn(p: u64, n: u64) -> Result<()> {
    if !is_prime(p) || p < 5 {
        return Err(Error::invalid(format!("p = {p} must be a prime ≥ 5")));
    }
    if n == 0 {
        return Err(Error::invalid("n must be ≥ 1".to_string()));
    }
    Ok(())
}

/// The 1-cocycle `σ_n = Σ_{i=1}^n C(n,i) p^{i−1−ν_p(n)} v_1^{n−i} t_1^i`
/// representing the α-family class; all coefficients are p-integral and
/// `cobar_d(σ_n) = 0`.
pub fn alpha_cocycle(p: u64, n: u64) -> Result<CobarElement> {
    validate_pn(p, n)?;
    let nu = int_p_valuation(n, p);
    let mut out: BTreeMap<(u64, u64), Rat> = BTreeMap::new();
    for i in 1..=n {
        let coeff = Rat::from_integer(binomial(n, i)) * p_pow(p, i as i64 - 1 - nu);
        add_into(&mut out, (n - i, i), &coeff);
    }
    let sigma = CobarElement::Deg1(out);
    if !sigma.is_p_integral(p) {
        return Err(Error::assertion(format!(
            "σ_{n} is not p-integral at p = {p}"
        )));
    }
    Ok(sigma)
}

/// Basis of the degree-1 component in internal degree `2n(p−1)`:
/// `v^{n−i} t^i`, `0 ≤ i ≤ n`.
fn deg1_basis(n: u64) -> Vec<(u64, u64)> {
    (0..=n).map(|i| (n - i, i)).collect()
}

/// Basis of the left-normalized degree-2 component in the same internal
/// degree: `v^a t^b ⊗ t^c` with `a + b + c = n`.
fn deg2_basis(n: u64) -> Vec<(u64, u64, u64)> {
    let mut basis = Vec::new();
    for a in 0..=n {
        for b in 0..=(n - a) {
            basis.push((a, b, n - a - b));
        }
    }
    basis
}

fn deg1_to_vec(e: &CobarElement, basis: &[(u64, u64)]) -> Result<Vec<Rat>> {
    let CobarElement::Deg1(t) = e else {
        return Err(Error::invalid("expected a degree-1 element".to_string()));
    };
    let mut v = vec![Rat::zero(); basis.len()];
    for (k, c) in t {
        let idx = basis
            .iter()
            .position(|b| b == k)
            .ok_or_else(|| Error::assertion(format!("monomial {k:?} outside the degree component")))?;
        v[idx] = c.clone();
    }
    Ok(v)
}

/// The matrix of `d¹` on the internal-degree-`2n(p−1)` component, with
/// integer entries (rows: degree-2 basis, columns: degree-1 basis).
fn d1_matrix(p: u64, n: u64) -> Result<IntMat> {
    let b1 = deg1_basis(n);
    let b2 = deg2_basis(n);
    let mut d = IntMat::zeros(b2.len(), b1.len());
    for (col, &(a, b)) in b1.iter().enumerate() {
        let image = cobar_d(p, &CobarElement::deg1_monomial(a, b, Rat::one()))?;
        let CobarElement::Deg2(t) = image else {
            unreachable!()
        };
        for (k, c) in &t {
            let row = b2
                .iter()
                .position(|x| x == k)
                .ok_or_else(|| Error::assertion(format!("monomial {k:?} outside degree")))?;
            if !c.is_integer() {
                return Err(Error::assertion(
                    "d¹ has a non-integer coefficient on the monomial basis".to_string(),
                ));
            }
            d.set(row, col, c.to_integer());
        }
    }
    Ok(d)
}

/// The order of the class of `σ_n` in `ker d¹ / im d⁰` in internal degree
/// `2n(p−1)`, computed by Smith normal form: the saturated integer kernel
/// of `d¹` is required to have rank 1 with `σ_n` a p-unit multiple of its
/// generator, and the order is the p-power relating `d⁰(v_1^n)` to the
/// generator.
pub fn ext1_order(p: u64, n: u64) -> Result<Int> {
    validate_pn(p, n)?;
    let b1 = deg1_basis(n);
    let kernel = integer_kernel_basis(&d1_matrix(p, n)?);
    if kernel.len() != 1 {
        return Err(Error::assertion(format!(
            "ker d¹ in internal degree 2·{n}·({p}−1) has rank {}, expected 1",
            kernel.len()
        )));
    }
    let gen = &kernel[0];
    let pivot = gen
        .iter()
        .position(|x| !x.is_zero())
        .ok_or_else(|| Error::assertion("zero kernel generator".to_string()))?;

    // σ_n must generate the kernel up to a p-local unit
    let sigma = deg1_to_vec(&alpha_cocycle(p, n)?, &b1)?;
    let unit = &sigma[pivot] / Rat::from_integer(gen[pivot].clone());
    for (s, g) in sigma.iter().zip(gen) {
        if s != &(&unit * Rat::from_integer(g.clone())) {
            return Err(Error::assertion(
                "σ_n is not proportional to the kernel generator".to_string(),
            ));
        }
    }
    if p_valuation(&unit, p) != Valuation::Finite(0) {
        return Err(Error::assertion(
            "σ_n differs from the kernel generator by a non-unit".to_string(),
        ));
    }

    // d⁰(v^n) = c · gen; the class order of the generator is p^{ν_p(c)},
    // and σ_n being a unit multiple has the same order
    let boundary = deg1_to_vec(&cobar_d(p, &CobarElement::v_pow(n))?, &b1)?;
    let c = &boundary[pivot] / Rat::from_integer(gen[pivot].clone());
    for (bv, g) in boundary.iter().zip(gen) {
        if bv != &(&c * Rat::from_integer(g.clone())) {
            return Err(Error::assertion(
                "d⁰(v_1^n) is not proportional to the kernel generator".to_string(),
            ));
        }
    }
    match p_valuation(&c, p) {
        Valuation::Finite(e) if e >= 0 => Ok(Int::from(p).pow(e as u32)),
        v => Err(Error::assertion(format!(
            "d⁰(v_1^n) has invalid p-valuation {v} against the kernel generator"
        ))),
    }
}

// ---------------------------------------------------------------------------
// The twisted complex for the two-cell pair
// ---------------------------------------------------------------------------

/// The twisted comodule pair `A ⊕ Σ^{2n(p−1)}A` with twist `ζ`
/// (`A`-linear, determined by the degree-1 value `ζ(1)`, which must be a
/// cocycle). Differentials:
///
/// `d̃⁰(x_0, x_1) = (d⁰x_0 − x_1·ζ(1), d⁰x_1)`
/// `d̃¹(y_0, y_1) = (d¹y_0 + normalize(y_1 ⊗ ζ(1)), d¹y_1)`
///
/// with the sign forced by `d̃¹ ∘ d̃⁰ = 0`.
pub struct TwistedComodulePair {
    pub p: u64,
    pub zeta: CobarElement,
}

impl TwistedComodulePair {
    pub fn new(p: u64, zeta: CobarElement) -> Result<TwistedComodulePair> {
        if zeta.degree() != 1 {
            return Err(Error::invalid("ζ(1) must be a degree-1 element".to_string()));
        }
        if !cobar_d(p, &zeta)?.is_zero() {
            return Err(Error::invalid(
                "ζ(1) must be a cocycle for the twisted coaction to coassociate".to_string(),
            ));
        }
        Ok(TwistedComodulePair { p, zeta })
    }

    /// Multiply a degree-0 polynomial into `ζ(1)` (the `A`-linear
    /// extension of the twist).
    fn zeta_of(&self, x: &CobarElement) -> Result<CobarElement> {
        let (CobarElement::Deg0(poly), CobarElement::Deg1(z)) = (x, &self.zeta) else {
            return Err(Error::invalid("ζ applies to degree-0 elements".to_string()));
        };
        let mut out: BTreeMap<(u64, u64), Rat> = BTreeMap::new();
        for (&m, cm) in poly {
            for (&(a, b), cz) in z {
                add_into(&mut out, (m + a, b), &(cm * cz));
            }
        }
        Ok(CobarElement::Deg1(out))
    }

    pub fn d0(
        &self,
        x0: &CobarElement,
        x1: &CobarElement,
    ) -> Result<(CobarElement, CobarElement)> {
        Ok((
            cobar_d(self.p, x0)?.add(&self.zeta_of(x1)?.scale(&-Rat::one())),
            cobar_d(self.p, x1)?,
        ))
    }

    pub fn d1(
        &self,
        y0: &CobarElement,
        y1: &CobarElement,
    ) -> Result<(CobarElement, CobarElement)> {
        let (CobarElement::Deg1(y1t), CobarElement::Deg1(z)) = (y1, &self.zeta) else {
            return Err(Error::invalid("d̃¹ applies to degree-1 pairs".to_string()));
        };
        let mut raw = Vec::new();
        for (&(a, b), cy) in y1t {
            for (&(d, e), cz) in z {
                raw.push(RawTensorTerm::new(a, b, d, e, cy * cz));
            }
        }
        Ok((
            cobar_d(self.p, y0)?.add(&normalize(self.p, &raw)),
            cobar_d(self.p, y1)?,
        ))
    }
}

/// The forced value of the twist on the two-cell pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZetaVerdict {
    /// `ζ(1) = (p^exponent · σ_n, 0)`.
    SigmaMultiple { exponent: u32 },
    /// `ζ(1) = 0` (the attaching map is null).
    Zero,
}

impl ZetaVerdict {
    /// Materialize the first component of `ζ(1)`.
    pub fn element(&self, p: u64, n: u64) -> Result<CobarElement> {
        match self {
            ZetaVerdict::SigmaMultiple { exponent } => {
                Ok(alpha_cocycle(p, n)?.scale(&p_pow(p, *exponent as i64)))
            }
            ZetaVerdict::Zero => Ok(CobarElement::zero(1)),
        }
    }
}

/// Force the twist of the two-cell pair for `p^j v_1^n α_1`: enumerate the
/// candidate values of `ζ(1)` in the relevant internal degree (cocycles:
/// `p^m σ_n` for `0 ≤ m ≤ ν_p(n)`, and `0`) and return the unique one for
/// which `(p^j σ_n, 0)` is a twisted coboundary while `(p^{j−1} σ_n, 0)`
/// is not (the latter condition dropped at `j = 0`). Uniqueness of the
/// passing candidate is asserted.
pub fn twisted_zeta_check(p: u64, n: u64, j: u32) -> Result<ZetaVerdict> {
    validate_pn(p, n)?;
    let nu = int_p_valuation(n, p);
    if (j as i64) > nu + 1 {
        return Err(Error::invalid(format!(
            "j = {j} exceeds ν_p(n) + 1 = {}; the pair is not modeled",
            nu + 1
        )));
    }
    let b1 = deg1_basis(n);
    let sigma = deg1_to_vec(&alpha_cocycle(p, n)?, &b1)?;
    let boundary = deg1_to_vec(&cobar_d(p, &CobarElement::v_pow(n))?, &b1)?;

    // is (p^e σ_n, 0) a twisted coboundary for the candidate ζ(1) = z?
    // The degree-0 sources are (c_0 v^n, c_1·1), giving the system
    // c_0·d⁰(v^n) − c_1·z = p^e σ_n over Z_(p).
    let coboundary = |z: &[Rat], e: u32| -> bool {
        let m = Mat::from_fn(b1.len(), 2, |i, col| {
            if col == 0 {
                boundary[i].clone()
            } else {
                -z[i].clone()
            }
        });
        let target: Vec<Rat> = sigma.iter().map(|s| s * p_pow(p, e as i64)).collect();
        smith_solve_local(&m, &target, p).is_some()
    };

    let mut candidates: Vec<(ZetaVerdict, Vec<Rat>)> = (0..=nu as u32)
        .map(|m| {
            let z: Vec<Rat> = sigma.iter().map(|s| s * p_pow(p, m as i64)).collect();
            (ZetaVerdict::SigmaMultiple { exponent: m }, z)
        })
        .collect();
    candidates.push((ZetaVerdict::Zero, vec![Rat::zero(); b1.len()]));

    let mut passing: Vec<ZetaVerdict> = Vec::new();
    for (verdict, z) in candidates {
        if coboundary(&z, j) && (j == 0 || !coboundary(&z, j - 1)) {
            passing.push(verdict);
        }
    }
    match passing.len() {
        1 => Ok(passing.pop().unwrap()),
        0 => Err(Error::assertion(format!(
            "no candidate twist kills (p^{j} σ_{n}, 0) at p = {p}"
        ))),
        _ => Err(Error::assertion(format!(
            "twist not unique at (p, n, j) = ({p}, {n}, {j}): {passing:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn deg1(terms: &[(u64, u64, i64)]) -> CobarElement {
        let mut t = BTreeMap::new();
        for &(a, b, c) in terms {
            if c != 0 {
                t.insert((a, b), rat(c));
            }
        }
        CobarElement::Deg1(t)
    }

    fn deg2(terms: &[(u64, u64, u64, i64)]) -> CobarElement {
        let mut t = BTreeMap::new();
        for &(a, b, c, coeff) in terms {
            if coeff != 0 {
                t.insert((a, b, c), rat(coeff));
            }
        }
        CobarElement::Deg2(t)
    }

    #[test]
    fn normalizer_reproduces_the_tensor_identity() {
        // v_1 ⊗ t_1 = 1 ⊗ v_1 t_1 − p·(t_1 ⊗ t_1): both sides normalize to
        // the same canonical form, namely the left-hand side itself.
        let p = 5;
        let lhs = normalize(p, &[RawTensorTerm::new(1, 0, 0, 1, rat(1))]);
        let rhs = normalize(
            p,
            &[
                RawTensorTerm::new(0, 0, 1, 1, rat(1)),
                RawTensorTerm::new(0, 1, 0, 1, rat(-5)),
            ],
        );
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, deg2(&[(1, 0, 1, 1)]));
    }

    #[test]
    fn normalizer_slides_eta_l_of_v() {
        // 1 ⊗ η_L(v_1) = η_R(v_1) ⊗ 1 = (v_1 + p t_1) ⊗ 1
        let out = normalize(5, &[RawTensorTerm::new(0, 0, 1, 0, rat(1))]);
        assert_eq!(out, deg2(&[(1, 0, 0, 1), (0, 1, 0, 5)]));
    }

    #[test]
    fn normalizer_is_idempotent_on_normal_forms() {
        // a left-normalized term re-enters as rv = 0 and is unchanged
        let once = normalize(5, &[RawTensorTerm::new(2, 1, 0, 3, rat(7))]);
        assert_eq!(once, deg2(&[(2, 1, 3, 7)]));
    }

    #[test]
    fn d0_of_v_is_p_t() {
        let d = cobar_d(5, &CobarElement::v_pow(1)).unwrap();
        assert_eq!(d, deg1(&[(0, 1, 5)]));
    }

    #[test]
    fn d1_of_t_vanishes() {
        let d = cobar_d(5, &deg1(&[(0, 1, 1)])).unwrap();
        assert!(d.is_zero(), "t_1 is primitive");
    }

    #[test]
    fn d1_of_v_as_degree_one_element() {
        // d¹(v·1) = 1⊗v − Δ(v) + v⊗1 = (v + pt)⊗1 − v⊗1 + v⊗1
        //         = (v + pt)⊗1: the −Δ and +(·)⊗1 terms cancel, leaving
        // the normalized 0th coface; so d¹(d⁰(v)) = d¹(η_R(v)) − d¹(v) = 0.
        let d = cobar_d(5, &deg1(&[(1, 0, 1)])).unwrap();
        assert_eq!(d, deg2(&[(1, 0, 0, 1), (0, 1, 0, 5)]));
        let d_eta_r = cobar_d(5, &deg1(&[(1, 0, 1), (0, 1, 5)])).unwrap();
        assert_eq!(d, d_eta_r);
    }

    #[test]
    fn d1_matches_its_closed_form() {
        // For b ≥ 1 the outer cofaces cancel the boundary terms of −Δ:
        //   d¹(v^a t^b) = Σ_{i≥1} C(a,i) p^i v^{a−i}t^i ⊗ t^b
        //               − Σ_{j=1}^{b−1} C(b,j) v^a t^j ⊗ t^{b−j};
        // for b = 0 only one cancellation happens and
        //   d¹(v^a) = (v + pt)^a ⊗ 1.
        let p = 7u64;
        for a in 0..=5u64 {
            for b in 0..=5u64 {
                let lit = cobar_d(p, &CobarElement::deg1_monomial(a, b, Rat::one())).unwrap();
                let mut closed: BTreeMap<(u64, u64, u64), Rat> = BTreeMap::new();
                let i_lo = if b == 0 { 0 } else { 1 };
                for i in i_lo..=a {
                    add_into(
                        &mut closed,
                        (a - i, i, b),
                        &(Rat::from_integer(binomial(a, i)) * p_pow(p, i as i64)),
                    );
                }
                for j in 1..b {
                    add_into(
                        &mut closed,
                        (a, j, b - j),
                        &-Rat::from_integer(binomial(b, j)),
                    );
                }
                assert_eq!(lit, CobarElement::Deg2(closed), "at (a, b) = ({a}, {b})");
            }
        }
    }

    #[test]
    fn d1_after_d0_vanishes_in_all_tested_degrees() {
        for p in [5u64, 7] {
            for m in 1..=10u64 {
                let d0 = cobar_d(p, &CobarElement::v_pow(m)).unwrap();
                let d1d0 = cobar_d(p, &d0).unwrap();
                assert!(d1d0.is_zero(), "d¹d⁰(v^{m}) ≠ 0 at p = {p}");
            }
        }
    }

    #[test]
    fn sigma_5_at_p5_frozen_expansion() {
        let sigma = alpha_cocycle(5, 5).unwrap();
        assert_eq!(
            sigma,
            deg1(&[(4, 1, 1), (3, 2, 10), (2, 3, 50), (1, 4, 125), (0, 5, 125)])
        );
    }

    #[test]
    fn sigma_1_is_t() {
        assert_eq!(alpha_cocycle(5, 1).unwrap(), deg1(&[(0, 1, 1)]));
        assert_eq!(alpha_cocycle(7, 1).unwrap(), deg1(&[(0, 1, 1)]));
    }

    #[test]
    fn sigma_is_an_integral_cocycle_up_to_n_10() {
        for p in [5u64, 7] {
            for n in 1..=10u64 {
                let sigma = alpha_cocycle(p, n).unwrap();
                assert!(sigma.is_p_integral(p));
                assert!(
                    cobar_d(p, &sigma).unwrap().is_zero(),
                    "d(σ_{n}) ≠ 0 at p = {p}"
                );
            }
        }
    }

    #[test]
    fn ext1_orders_match_the_one_line() {
        assert_eq!(ext1_order(5, 1).unwrap(), Int::from(5));
        assert_eq!(ext1_order(5, 5).unwrap(), Int::from(25));
        assert_eq!(ext1_order(7, 3).unwrap(), Int::from(7));
    }

    #[test]
    fn class_order_cross_checks() {
        // p^{1+ν}·σ_n is literally d⁰(v^n); p^ν·σ_n is not a p-local
        // multiple of it.
        for (p, n) in [(5u64, 5u64), (7, 7), (5, 2)] {
            let nu = int_p_valuation(n, p);
            let b1 = deg1_basis(n);
            let sigma = deg1_to_vec(&alpha_cocycle(p, n).unwrap(), &b1).unwrap();
            let boundary =
                deg1_to_vec(&cobar_d(p, &CobarElement::v_pow(n)).unwrap(), &b1).unwrap();
            let scaled: Vec<Rat> = sigma.iter().map(|s| s * p_pow(p, nu + 1)).collect();
            assert_eq!(scaled, boundary, "p^(1+ν)σ_n = d⁰(v^n) at ({p}, {n})");

            // p^ν σ_n = c·d⁰(v^n) has no solution c ∈ Z_(p)
            let m = Mat::from_fn(b1.len(), 1, |i, _| boundary[i].clone());
            let target: Vec<Rat> = sigma.iter().map(|s| s * p_pow(p, nu)).collect();
            assert!(smith_solve_local(&m, &target, p).is_none());
        }
    }

    #[test]
    fn twisted_zeta_forced_values() {
        assert_eq!(
            twisted_zeta_check(5, 1, 0).unwrap(),
            ZetaVerdict::SigmaMultiple { exponent: 0 }
        );
        assert_eq!(
            twisted_zeta_check(5, 5, 0).unwrap(),
            ZetaVerdict::SigmaMultiple { exponent: 0 }
        );
        assert_eq!(
            twisted_zeta_check(5, 5, 1).unwrap(),
            ZetaVerdict::SigmaMultiple { exponent: 1 }
        );
        assert_eq!(
            twisted_zeta_check(7, 1, 0).unwrap(),
            ZetaVerdict::SigmaMultiple { exponent: 0 }
        );
        // at j = ν + 1 the attaching map is null and ζ(1) = 0
        assert_eq!(twisted_zeta_check(5, 1, 1).unwrap(), ZetaVerdict::Zero);
        assert_eq!(twisted_zeta_check(5, 5, 2).unwrap(), ZetaVerdict::Zero);
        // beyond ν + 1 the pair is not modeled
        assert!(twisted_zeta_check(5, 1, 2).is_err());
    }

    #[test]
    fn zeta_element_materializes() {
        let z = twisted_zeta_check(5, 1, 0).unwrap().element(5, 1).unwrap();
        assert_eq!(z, deg1(&[(0, 1, 1)])); // t_1
        let z = twisted_zeta_check(5, 5, 1).unwrap().element(5, 5).unwrap();
        assert_eq!(
            z,
            deg1(&[(4, 1, 5), (3, 2, 50), (2, 3, 250), (1, 4, 625), (0, 5, 625)])
        );
    }

    #[test]
    fn twisted_differentials_compose_to_zero() {
        for (p, n, m) in [(5u64, 1u64, 0u32), (5, 5, 0), (5, 5, 1), (7, 3, 0)] {
            let zeta = alpha_cocycle(p, n).unwrap().scale(&p_pow(p, m as i64));
            let pair = TwistedComodulePair::new(p, zeta).unwrap();
            for deg in 1..=6u64 {
                for (x0, x1) in [
                    (CobarElement::v_pow(deg), CobarElement::zero(0)),
                    (CobarElement::zero(0), CobarElement::v_pow(deg)),
                    (CobarElement::v_pow(deg), CobarElement::v_pow(deg)),
                ] {
                    let (y0, y1) = pair.d0(&x0, &x1).unwrap();
                    let (z0, z1) = pair.d1(&y0, &y1).unwrap();
                    assert!(
                        z0.is_zero() && z1.is_zero(),
                        "d̃¹d̃⁰ ≠ 0 at (p, n, m, deg) = ({p}, {n}, {m}, {deg})"
                    );
                }
            }
        }
    }

    #[test]
    fn twisted_pair_rejects_non_cocycle_twist() {
        // v·1 is not a cocycle (d¹(v) = p·t⊗1 ≠ 0)
        assert!(TwistedComodulePair::new(5, deg1(&[(1, 0, 1)])).is_err());
    }

    #[test]
    fn homogeneity_bookkeeping() {
        assert_eq!(alpha_cocycle(5, 5).unwrap().homogeneous_degree(), Some(5));
        assert_eq!(CobarElement::v_pow(3).homogeneous_degree(), Some(3));
        let mixed = deg1(&[(0, 1, 1), (2, 1, 1)]);
        assert_eq!(mixed.homogeneous_degree(), None);
    }
}
