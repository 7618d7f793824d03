//! Commutator calculus against multiplication by `E = E_{p−1}`, and the
//! resulting Hochschild 1-cocycles on the Hecke action.
//!
//! Fix a prime `p ≥ 5`, set `μ = p`, and let `e` denote multiplication by
//! `E = E_{p−1}` (which is `≡ 1 mod p` coefficientwise). For a
//! weight-indexed operator family `T` the basic derivation is
//!
//! `δ(T) = (T∘e − e∘T)/μ : M_k → M_{k+(p−1)}`,
//!
//! whose exactness is a divisibility theorem, re-verified entrywise on
//! every call. Its higher companions are
//!
//! `D_n(T) = Σ_{i=1}^n C(n,i) e^{n−i} μ^{i−1} δ^i(T)`  (defining sum), and
//! `D_n(T) = (T∘e^n − e^n∘T)/μ`                         (closed form);
//!
//! both are computed on every call and compared exactly. Finally
//! `Δ_n(T) = D_n(T)/p^{ν_p(n)}` (again exact), and
//! `κ(ℓ) = Δ_n(T_ℓ)` assembles into a Hochschild 1-cocycle on the
//! truncated Hecke algebra, whose cohomology-class order is computed by
//! deciding coboundary equations `T_ℓ F − F T_ℓ = p^m κ(ℓ)` over `Z_(p)`.

use std::collections::{BTreeMap, HashMap};

use num::{BigInt, One, Zero};

use crate::arith::{binomial, is_prime, p_valuation, rat, Rat, Valuation};
use crate::error::Error;
use crate::linalg::{smith_solve_local, Field, Mat, Quad};
use crate::modforms::{dim_mk, eigenvalue_on, mult_matrix, HeckeContext};
use crate::qseries::{eisenstein, QSeries};
use crate::Result;

type Int = BigInt;

/// A weight-indexed operator family: `at(k)` is the matrix of the
/// operator on `M_k` (in Miller coordinates). All families fed to the
/// derivations preserve weight; the derivations themselves shift it.
pub type OpFamily<'a> = &'a dyn Fn(i64) -> Result<Mat<Rat>>;

/// The commutator context `(p, μ = p, E = E_{p−1}, n)`.
pub struct CommutatorContext<'a> {
    pub p: u64,
    pub n: u64,
    pub mu: Rat,
    hecke: &'a HeckeContext,
    /// precision to which `E ≡ 1 (mod p)` was verified at construction
    checked_prec: usize,
}

/// Coefficientwise precision of the `E_{p−1} ≡ 1 (mod p)` construction
/// check.
const E_CONGRUENCE_PREC: usize = 60;

impl<'a> CommutatorContext<'a> {
    /// Build the context, rejecting invalid `(p, n)` and verifying the
    /// congruence `E_{p−1} ≡ 1 (mod p)` coefficientwise.
    pub fn new(hecke: &'a HeckeContext, p: u64, n: u64) -> Result<CommutatorContext<'a>> {
        if !is_prime(p) || p < 5 {
            return Err(Error::invalid(format!(
                "p must be a prime >= 5 (E_{{p-1}} is not defined at p = {p})"
            )));
        }
        if n == 0 {
            return Err(Error::invalid("n must be >= 1".to_string()));
        }
        let e = eisenstein((p - 1) as i64, E_CONGRUENCE_PREC)?;
        if !e.coeff(0).is_one() {
            return Err(Error::assertion("E has constant term != 1".to_string()));
        }
        for m in 1..E_CONGRUENCE_PREC {
            if !matches!(p_valuation(e.coeff(m), p), Valuation::Infinity | Valuation::Finite(1..)) {
                return Err(Error::assertion(format!(
                    "E_{} is not 1 mod {p} at coefficient {m}",
                    p - 1
                )));
            }
        }
        Ok(CommutatorContext {
            p,
            n,
            mu: rat(p as i64),
            hecke,
            checked_prec: E_CONGRUENCE_PREC,
        })
    }

    pub fn hecke(&self) -> &'a HeckeContext {
        self.hecke
    }

    /// `ν_p(n)` for this context's `n`.
    pub fn nu(&self) -> i64 {
        crate::arith::int_p_valuation(self.n, self.p)
    }

    /// The weight shift `p − 1` of a single `δ`.
    fn step(&self) -> i64 {
        (self.p - 1) as i64
    }

    /// `E_{p−1}` to the requested precision.
    pub fn e_series(&self, prec: usize) -> QSeries {
        let _ = self.checked_prec;
        eisenstein((self.p - 1) as i64, prec).expect("p - 1 >= 4 and even")
    }

    /// Matrix of multiplication by `E`: `M_w → M_{w+(p−1)}`.
    pub fn e_matrix(&self, w: i64) -> Result<Mat<Rat>> {
        let prec = dim_mk(w + self.step()) + 1;
        mult_matrix(self.hecke, w, &self.e_series(prec))
    }

    /// Matrix of multiplication by `E^m`: `M_w → M_{w+m(p−1)}`, as the
    /// composite of single-`E` steps.
    pub fn e_pow_matrix(&self, w: i64, m: u64) -> Result<Mat<Rat>>  {
        let mut acc = Mat::identity(dim_mk(w));
        for i in 0..m {
            acc = self.e_matrix(w + (i as i64) * self.step())?.mul(&acc);
        }
        Ok(acc)
    }

    /// The Hecke operator `T_m` as a weight family.
    pub fn hecke_op(&self, m: u64) -> impl Fn(i64) -> Result<Mat<Rat>> + '_ {
        move |w| self.hecke.hecke_matrix(w, m)
    }

    /// `(μδ)^i(T)` at weight `w`, computed without any division:
    /// `(μδ)(X)(w) = X(w+(p−1))·e(w) − e(w+shift(X))·X(w)`.
    fn mu_delta_pow(
        &self,
        t: OpFamily,
        i: u64,
        w: i64,
        memo: &mut HashMap<(u64, i64), Mat<Rat>>,
    ) -> Result<Mat<Rat>> {
        if let Some(m) = memo.get(&(i, w)) {
            return Ok(m.clone());
        }
        let out = if i == 0 {
            t(w)?
        } else {
            let upper = self.mu_delta_pow(t, i - 1, w + self.step(), memo)?;
            let lower = self.mu_delta_pow(t, i - 1, w, memo)?;
            let shift = ((i - 1) as i64) * self.step();
            upper.mul(&self.e_matrix(w)?).sub(&self.e_matrix(w + shift)?.mul(&lower))
        };
        memo.insert((i, w), out.clone());
        Ok(out)
    }

    /// `δ(T): M_k → M_{k+(p−1)}`, `f ↦ (T(Ef) − E·T(f))/μ`. The
    /// commutation `TE ≡ ET (mod μ)` is verified entrywise, not assumed.
    pub fn apply_delta(&self, t: OpFamily, k: i64) -> Result<Mat<Rat>> {
        let mut memo = HashMap::new();
        let num = self.mu_delta_pow(t, 1, k, &mut memo)?;
        div_exact_p_power(&num, self.p, 1).ok_or_else(|| {
            Error::assertion(format!(
                "T∘e − e∘T is not divisible by {} at weight {k}",
                self.p
            ))
        })
    }

    /// `D_n(T): M_k → M_{k+n(p−1)}`, computed **both** as the defining sum
    /// `Σ_{i=1}^n C(n,i) e^{n−i} μ^{i−1} δ^i(T)` and as the closed form
    /// `(T∘e^n − e^n∘T)/μ`; the two routes must agree exactly.
    pub fn apply_dn(&self, t: OpFamily, k: i64) -> Result<Mat<Rat>> {
        let n = self.n;
        let d_to = dim_mk(k + (n as i64) * self.step());
        let d_from = dim_mk(k);

        // Route 1: the defining sum, with all μ-powers kept on the left so
        // that a single exact division by μ happens at the end:
        // Σ C(n,i) e^{n−i} (μδ)^i(T) = μ·D_n(T).
        let mut memo = HashMap::new();
        let mut sum = Mat::zeros(d_to, d_from);
        for i in 1..=n {
            let inner = self.mu_delta_pow(t, i, k, &mut memo)?;
            let outer = self.e_pow_matrix(k + (i as i64) * self.step(), n - i)?;
            let coeff = Rat::from_integer(binomial(n, i));
            sum = sum.add(&outer.mul(&inner).scalar_mul(&coeff));
        }
        let route_sum = div_exact_p_power(&sum, self.p, 1).ok_or_else(|| {
            Error::assertion(format!(
                "defining sum for D_{n} is not divisible by {} at weight {k}",
                self.p
            ))
        })?;

        // Route 2: (T e^n − e^n T)/μ.
        let en = self.e_pow_matrix(k, n)?;
        let num = t(k + (n as i64) * self.step())?.mul(&en).sub(&en.mul(&t(k)?));
        let route_closed = div_exact_p_power(&num, self.p, 1).ok_or_else(|| {
            Error::assertion(format!(
                "T∘e^{n} − e^{n}∘T is not divisible by {} at weight {k}",
                self.p
            ))
        })?;

        if route_sum != route_closed {
            return Err(Error::assertion(format!(
                "D_{n} routes disagree at (p, k) = ({}, {k})",
                self.p
            )));
        }
        Ok(route_sum)
    }

    /// `Δ_n(T) = D_n(T)/p^{ν_p(n)}`, entrywise exact.
    pub fn apply_delta_n(&self, t: OpFamily, k: i64) -> Result<Mat<Rat>> {
        let dn = self.apply_dn(t, k)?;
        div_exact_p_power(&dn, self.p, self.nu()).ok_or_else(|| {
            Error::assertion(format!(
                "D_{}(T) is not divisible by {}^{} at weight {k}",
                self.n,
                self.p,
                self.nu()
            ))
        })
    }

    /// The Hochschild 1-cocycle `κ(ℓ) = Δ_n(T_ℓ)` on the truncation set
    /// `L`, with its cocycle condition verified as exact matrix identities.
    pub fn kappa_cocycle(&self, k: i64, truncation: &[u64]) -> Result<HochschildCochain1> {
        let mut values = BTreeMap::new();
        for &l in truncation {
            if !is_prime(l) {
                return Err(Error::invalid(format!("{l} is not prime")));
            }
            let op = self.hecke_op(l);
            values.insert(l, self.apply_delta_n(&op, k)?);
        }
        let c = HochschildCochain1 {
            weight_in: k,
            weight_shift: (self.n as i64) * self.step(),
            values,
        };
        c.verify_cocycle(self.hecke)?;
        Ok(c)
    }

    /// The smallest power `p^m` such that `p^m·κ` is a coboundary at
    /// truncation `(k, L)` — the order of the cohomology class. The search
    /// is capped at `m = ν_p(n) + 3`; exceeding the cap is an error, not a
    /// silent answer.
    pub fn class_order(&self, k: i64, truncation: &[u64]) -> Result<Int> {
        let kappa = self.kappa_cocycle(k, truncation)?;
        let cap = (self.nu() + 3) as u32;
        let mut scale = Rat::one();
        for m in 0..=cap {
            let scaled = kappa.scale(&scale);
            if is_coboundary_hom(self.hecke, &scaled, self.p)?.is_some() {
                return Ok(Int::from(self.p).pow(m));
            }
            scale *= &self.mu;
        }
        Err(Error::assertion(format!(
            "class order of kappa at (p, n, k) = ({}, {}, {k}) exceeds p^{cap}",
            self.p, self.n
        )))
    }
}

/// Divide every entry of a matrix by `p^e`, returning `None` unless every
/// entry has `ν_p ≥ e`.
fn div_exact_p_power(m: &Mat<Rat>, p: u64, e: i64) -> Option<Mat<Rat>> {
    if e == 0 {
        return Some(m.clone());
    }
    let mut out = Mat::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let x = m.get(i, j);
            match p_valuation(x, p) {
                Valuation::Infinity => {}
                Valuation::Finite(v) if v >= e => {
                    out.set(i, j, crate::arith::div_pow_p(x, p, e));
                }
                _ => return None,
            }
        }
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Hochschild 1-cochains
// ---------------------------------------------------------------------------

/// A matrix-valued Hochschild 1-cochain on the truncated Hecke algebra,
/// valued in `Hom(M_k, M_{k+s})` with both actions by genuine composition.
#[derive(Clone, Debug, PartialEq)]
pub struct HochschildCochain1 {
    pub weight_in: i64,
    pub weight_shift: i64,
    /// `ℓ ↦ value on T_ℓ`, a `dim M_{k+s} × dim M_k` matrix.
    pub values: BTreeMap<u64, Mat<Rat>>,
}

impl HochschildCochain1 {
    /// Entrywise scaling of all values.
    pub fn scale(&self, c: &Rat) -> HochschildCochain1 {
        HochschildCochain1 {
            weight_in: self.weight_in,
            weight_shift: self.weight_shift,
            values: self
                .values
                .iter()
                .map(|(l, v)| (*l, v.scalar_mul(c)))
                .collect(),
        }
    }

    /// True iff every value is the zero matrix.
    pub fn is_zero(&self) -> bool {
        self.values.values().all(Mat::is_zero)
    }

    /// The cocycle condition on commuting generators:
    /// `T_ℓ v(ℓ′) − v(ℓ′) T_ℓ = T_{ℓ′} v(ℓ) − v(ℓ) T_{ℓ′}` for all
    /// `ℓ, ℓ′ ∈ L`, with `T` acting at the appropriate weights.
    pub fn verify_cocycle(&self, hecke: &HeckeContext) -> Result<()> {
        let k = self.weight_in;
        let k_to = k + self.weight_shift;
        let ls: Vec<u64> = self.values.keys().copied().collect();
        for (a, &l1) in ls.iter().enumerate() {
            for &l2 in &ls[a + 1..] {
                let lhs = hecke
                    .hecke_matrix(k_to, l1)?
                    .mul(&self.values[&l2])
                    .sub(&self.values[&l2].mul(&hecke.hecke_matrix(k, l1)?));
                let rhs = hecke
                    .hecke_matrix(k_to, l2)?
                    .mul(&self.values[&l1])
                    .sub(&self.values[&l1].mul(&hecke.hecke_matrix(k, l2)?));
                if lhs != rhs {
                    return Err(Error::assertion(format!(
                        "cocycle condition fails at (ℓ, ℓ′) = ({l1}, {l2}), weight {k}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A vector-valued Hochschild 1-cochain in the twisted bimodule `M^λ`:
/// left action by genuine Hecke operators on `M_weight`, right action
/// through the eigencharacter `λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedCochain1 {
    /// Weight of the value space.
    pub weight: i64,
    /// The twisting character `ℓ ↦ λ(T_ℓ)`.
    pub lambda: BTreeMap<u64, Quad>,
    /// `ℓ ↦ value on T_ℓ`, a vector in `M_weight` (Miller coordinates,
    /// possibly over a quadratic extension).
    pub values: BTreeMap<u64, Vec<Quad>>,
}

impl TwistedCochain1 {
    /// Entrywise scaling of all values.
    pub fn scale(&self, c: &Rat) -> TwistedCochain1 {
        TwistedCochain1 {
            weight: self.weight,
            lambda: self.lambda.clone(),
            values: self
                .values
                .iter()
                .map(|(l, v)| (*l, v.iter().map(|x| x.scale(c)).collect()))
                .collect(),
        }
    }

    /// True iff every value is the zero vector.
    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| v.iter().all(Quad::is_zero))
    }

    /// The twisted cocycle condition on commuting generators:
    /// `T_ℓ w(ℓ′) − λ(ℓ) w(ℓ′) = T_{ℓ′} w(ℓ) − λ(ℓ′) w(ℓ)`.
    pub fn verify_cocycle(&self, hecke: &HeckeContext) -> Result<()> {
        let ls: Vec<u64> = self.values.keys().copied().collect();
        for (a, &l1) in ls.iter().enumerate() {
            for &l2 in &ls[a + 1..] {
                let t1 = hecke.hecke_matrix(self.weight, l1)?.to_quad();
                let t2 = hecke.hecke_matrix(self.weight, l2)?.to_quad();
                let lhs = sub_vec(&t1.apply(&self.values[&l2]), &scale_vec(&self.values[&l2], &self.lambda[&l1]));
                let rhs = sub_vec(&t2.apply(&self.values[&l1]), &scale_vec(&self.values[&l1], &self.lambda[&l2]));
                if lhs != rhs {
                    return Err(Error::assertion(format!(
                        "twisted cocycle condition fails at (ℓ, ℓ′) = ({l1}, {l2})"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn scale_vec(v: &[Quad], c: &Quad) -> Vec<Quad> {
    v.iter().map(|x| x.mul_ref(c)).collect()
}

fn sub_vec(a: &[Quad], b: &[Quad]) -> Vec<Quad> {
    a.iter().zip(b).map(|(x, y)| x.sub_ref(y)).collect()
}

// ---------------------------------------------------------------------------
// Coboundary decisions over Z_(p)
// ---------------------------------------------------------------------------

/// Decide whether a matrix-valued cochain is a coboundary in
/// `Hom(M_k, M_{k+s})` over `Z_(p)`: is there a p-integral matrix `F` with
/// `T_ℓ F − F T_ℓ = v(ℓ)` for every `ℓ`? Returns the witness.
pub fn is_coboundary_hom(
    hecke: &HeckeContext,
    c: &HochschildCochain1,
    p: u64,
) -> Result<Option<Mat<Rat>>> {
    let k = c.weight_in;
    let k_to = k + c.weight_shift;
    let df = dim_mk(k);
    let dt = dim_mk(k_to);
    if df == 0 || dt == 0 {
        return Ok(Some(Mat::zeros(dt, df)));
    }
    let mut rows: Option<Mat<Rat>> = None;
    let mut rhs: Vec<Rat> = Vec::new();
    for (&l, v) in &c.values {
        let block = crate::modforms::hom_commutator_matrix(
            &hecke.hecke_matrix(k_to, l)?,
            &hecke.hecke_matrix(k, l)?,
        );
        rows = Some(match rows {
            None => block,
            Some(r) => r.vstack(&block),
        });
        for i in 0..dt {
            for j in 0..df {
                rhs.push(v.get(i, j).clone());
            }
        }
    }
    let rows = rows.ok_or_else(|| Error::invalid("empty truncation set".to_string()))?;
    Ok(smith_solve_local(&rows, &rhs, p).map(|x| {
        let f = Mat::from_fn(dt, df, |i, j| x[i * df + j].clone());
        for (&l, v) in &c.values {
            // re-verify the witness against the defining equations
            let t_to = hecke.hecke_matrix(k_to, l).expect("matrix already computed");
            let t_from = hecke.hecke_matrix(k, l).expect("matrix already computed");
            debug_assert_eq!(t_to.mul(&f).sub(&f.mul(&t_from)), *v);
        }
        f
    }))
}

/// Decide whether a twisted cochain is a coboundary in `M^λ` over `Z_(p)`:
/// is there a p-integral `h ∈ M_weight ⊗ K` with
/// `T_ℓ h − λ(ℓ) h = w(ℓ)` for every `ℓ`? Quadratic characters split into
/// rational and surd components, doubling the system. Returns the witness.
pub fn is_coboundary_twisted(
    hecke: &HeckeContext,
    c: &TwistedCochain1,
    p: u64,
) -> Result<Option<Vec<Quad>>> {
    let d = dim_mk(c.weight);
    if d == 0 {
        return Ok(Some(Vec::new()));
    }
    // unify the discriminant across λ values and cochain values
    let mut disc = Int::zero();
    for x in c.lambda.values().chain(c.values.values().flatten()) {
        let dx = x.disc();
        if !dx.is_zero() {
            if disc.is_zero() {
                disc = dx.clone();
            } else if disc != *dx {
                return Err(Error::IncompatibleExtensions(disc, dx.clone()));
            }
        }
    }

    if disc.is_zero() {
        // fully rational system: (T − λ(ℓ))h = w(ℓ)
        let mut rows: Option<Mat<Rat>> = None;
        let mut rhs = Vec::new();
        for (&l, w) in &c.values {
            let t = hecke.hecke_matrix(c.weight, l)?;
            let lam = c.lambda[&l].as_rat().expect("rational by disc check").clone();
            let block = t.sub(&Mat::<Rat>::identity(d).scalar_mul(&lam));
            rows = Some(match rows {
                None => block,
                Some(r) => r.vstack(&block),
            });
            for x in w {
                rhs.push(x.as_rat().expect("rational by disc check").clone());
            }
        }
        let rows = rows.ok_or_else(|| Error::invalid("empty truncation set".to_string()))?;
        return Ok(smith_solve_local(&rows, &rhs, p)
            .map(|h| h.into_iter().map(Quad::from_rat).collect()));
    }

    // quadratic case: h = h0 + h1·√disc, 2d rational unknowns;
    //   rational part: (T − αI)h0 − β·disc·h1 = w0
    //   surd part:     −β·h0 + (T − αI)h1     = w1
    let disc_rat = Rat::from_integer(disc.clone());
    let mut rows: Option<Mat<Rat>> = None;
    let mut rhs = Vec::new();
    for (&l, w) in &c.values {
        let t = hecke.hecke_matrix(c.weight, l)?;
        let lam = &c.lambda[&l];
        let (alpha, beta) = (lam.ra().clone(), lam.rb().clone());
        let block = Mat::from_fn(2 * d, 2 * d, |i, j| {
            let (bi, bj) = (i / d, j / d);
            let (ii, jj) = (i % d, j % d);
            let mut v = Rat::zero();
            if bi == bj {
                v += t.get(ii, jj);
                if ii == jj {
                    v -= &alpha;
                }
            } else if ii == jj {
                v -= &beta;
                if bi == 0 {
                    v *= &disc_rat;
                }
            }
            v
        });
        rows = Some(match rows {
            None => block,
            Some(r) => r.vstack(&block),
        });
        for part in 0..2 {
            for x in w {
                rhs.push(if part == 0 { x.ra().clone() } else { x.rb().clone() });
            }
        }
    }
    let rows = rows.ok_or_else(|| Error::invalid("empty truncation set".to_string()))?;
    Ok(smith_solve_local(&rows, &rhs, p).map(|x| {
        (0..d)
            .map(|i| Quad::new(x[i].clone(), x[d + i].clone(), disc.clone()))
            .collect()
    }))
}

// ---------------------------------------------------------------------------
// Dot-cup product
// ---------------------------------------------------------------------------

/// The dot-cup product of an eigenform `f ∈ M_k ⊗ K` (Miller coordinates)
/// with a matrix-valued cochain `c` on `M_k`: the twisted cochain
/// `(f ⌣· c)(T_ℓ) = c(ℓ)·f ∈ M_{k+s} ⊗ K`, valued in `M^λ` for the
/// character `λ` of `f`. Errors if `f` fails to be an eigenform at some
/// `ℓ` in the truncation set.
pub fn dotcup(
    hecke: &HeckeContext,
    f: &[Quad],
    c: &HochschildCochain1,
) -> Result<TwistedCochain1> {
    let k = c.weight_in;
    if f.len() != dim_mk(k) {
        return Err(Error::invalid(format!(
            "form has {} coordinates, dim M_{k} = {}",
            f.len(),
            dim_mk(k)
        )));
    }
    if f.iter().all(Quad::is_zero) {
        // zero form: zero cochain (any character; use the trivial-λ record
        // of eigenvalues being irrelevant — store zeros)
        let lambda: BTreeMap<u64, Quad> = c.values.keys().map(|&l| (l, Quad::from_i64(0))).collect();
        let values = c.values.keys().map(|&l| (l, vec![Quad::from_i64(0); dim_mk(k + c.weight_shift)])).collect();
        return Ok(TwistedCochain1 { weight: k + c.weight_shift, lambda, values });
    }
    let mut lambda = BTreeMap::new();
    let mut values = BTreeMap::new();
    for (&l, v) in &c.values {
        lambda.insert(l, eigenvalue_on(hecke, k, l, f)?);
        values.insert(l, v.to_quad().apply(f));
    }
    let out = TwistedCochain1 {
        weight: k + c.weight_shift,
        lambda,
        values,
    };
    out.verify_cocycle(hecke)?;
    Ok(out)
}
