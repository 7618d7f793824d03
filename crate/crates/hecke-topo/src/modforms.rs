//! The graded ring `M_*` of level-1 holomorphic modular forms: dimensions,
//! the echelon (Miller) basis, q-expansion ↔ coordinate conversion, Hecke
//! matrices, and eigencharacter enumeration.
//!
//! Conventions, all exact:
//! - `dim M_k = 0` for `k` odd, negative, or `k = 2`; otherwise
//!   `⌊k/12⌋ + 1` when `k mod 12 ≠ 2` and `⌊k/12⌋` when `k mod 12 = 2`.
//! - The Miller basis `g_0, …, g_{d−1}` of `M_k` consists of integer
//!   q-expansions with `a_i(g_j) = δ_{ij}` for `i, j < d`; each `g_j` is a
//!   `Z`-combination of monomials `Δ^j E_4^a E_6^b` (`b ∈ {0, 1}`).
//!   Coordinates of a form are therefore literally its first `d`
//!   coefficients.
//! - `T_ℓ` acts on q-expansions by `a_m(T_ℓ f) = a_{ℓm}(f) + ℓ^{k−1} a_{m/ℓ}(f)`
//!   (second term only when `ℓ | m`), and composite indices follow the
//!   recursions `T_{mn} = T_m T_n` for `(m, n) = 1` and
//!   `T_{ℓ^{r+2}} = T_ℓ T_{ℓ^{r+1}} − ℓ^{k−1} T_{ℓ^r}`.
//! - Independently of the recursions, [`HeckeContext::hecke_matrix_direct`]
//!   evaluates the closed divisor-sum formula
//!   `a_m(T_n f) = Σ_{e | gcd(m,n)} e^{k−1} a_{mn/e²}(f)`, so the recursion
//!   identities can be checked against a second route rather than against
//!   themselves.
//!
//! Matrices of `T_n` are memoized in memory and cached on disk keyed by
//! `(k, n)` (directory from `HECKE_TOPO_CACHE`, default `./.cache`); the
//! cache is a pure optimization — unreadable files are recomputed and
//! rewritten, never trusted.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::Mutex;

use num::{BigInt, Integer, One, Signed, Zero};
use serde_json::{json, Value};

use crate::arith::{is_prime, rat, Rat};
use crate::error::Error;
use crate::linalg::{kernel_basis, strip_square_factors, Field, Mat, Quad};
use crate::qseries::{delta_series, eisenstein, QSeries};
use crate::Result;

type Int = BigInt;

/// `dim M_k` for level 1: 0 for odd, negative, or weight 2; otherwise
/// `⌊k/12⌋ + 1` unless `k ≡ 2 (mod 12)`, where it is `⌊k/12⌋`.
pub fn dim_mk(k: i64) -> usize {
    if k < 0 || k % 2 != 0 || k == 2 {
        return 0;
    }
    let q = (k / 12) as usize;
    if k % 12 == 2 {
        q
    } else {
        q + 1
    }
}

/// `ℓ^e` as an exact rational (negative exponents allowed; `e = k − 1` is
/// −1 at weight 0, where `T_ℓ` multiplies constants by `1 + 1/ℓ`).
pub fn prime_power_rat(l: u64, e: i64) -> Rat {
    let base = Rat::from_integer(Int::from(l));
    if e >= 0 {
        let mut acc = Rat::one();
        for _ in 0..e {
            acc *= &base;
        }
        acc
    } else {
        Rat::one() / prime_power_rat(l, -e)
    }
}

/// The exponents `(a, b)` with `4a + 6b = w`, `b ∈ {0, 1}`, for even
/// `w ≥ 4` or `w = 0`.
fn e4_e6_exponents(w: i64) -> (u32, u32) {
    debug_assert!(w >= 0 && w % 2 == 0 && w != 2);
    if w % 4 == 0 {
        ((w / 4) as u32, 0)
    } else {
        (((w - 6) / 4) as u32, 1)
    }
}

// ---------------------------------------------------------------------------
// Context: bases, Hecke matrices, cache
// ---------------------------------------------------------------------------

/// Shared computation context: memoized Miller bases and monomial series,
/// memoized Hecke matrices, and the on-disk matrix cache.
///
/// All memo tables grow monotonically in precision; a request never
/// downgrades a cached series, it slices it.
pub struct HeckeContext {
    cache_dir: Option<PathBuf>,
    /// `Δ^j E_4^a E_6^b` at the highest precision computed so far.
    monomials: Mutex<HashMap<(u32, u32, u32), QSeries>>,
    /// Miller basis per weight at the highest precision computed so far.
    bases: Mutex<HashMap<i64, Vec<QSeries>>>,
    /// Hecke matrices keyed by `(weight, index)`.
    matrices: Mutex<HashMap<(i64, u64), Mat<Rat>>>,
}

impl HeckeContext {
    /// Context with the disk cache at `$HECKE_TOPO_CACHE` (default
    /// `./.cache`).
    pub fn new() -> HeckeContext {
        let dir = std::env::var_os("HECKE_TOPO_CACHE")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("./.cache"));
        HeckeContext::with_cache_dir(Some(dir))
    }

    /// Context with an explicit cache directory (`None` disables the disk
    /// cache; memory memoization stays on).
    pub fn with_cache_dir(cache_dir: Option<PathBuf>) -> HeckeContext {
        HeckeContext {
            cache_dir,
            monomials: Mutex::new(HashMap::new()),
            bases: Mutex::new(HashMap::new()),
            matrices: Mutex::new(HashMap::new()),
        }
    }

    /// The monomial `Δ^j E_4^a E_6^b` to at least `prec` coefficients.
    fn monomial(&self, j: u32, a: u32, b: u32, prec: usize) -> QSeries {
        let prec = prec.max(1);
        if let Some(s) = self.monomials.lock().unwrap().get(&(j, a, b)) {
            if s.prec() >= prec {
                return s.truncate(prec);
            }
        }
        let computed = if j > 0 {
            self.monomial(j - 1, a, b, prec)
                .mul(&self.primitive_delta(prec))
        } else if a > 0 {
            self.monomial(j, a - 1, b, prec)
                .mul(&self.primitive_e4(prec))
        } else if b > 0 {
            // b ≤ 1 in Miller monomials, so this bottoms out at E_6 itself
            self.monomial(j, a, b - 1, prec)
                .mul(&self.primitive_e6(prec))
        } else {
            QSeries::one(prec)
        };
        let mut memo = self.monomials.lock().unwrap();
        let entry = memo.entry((j, a, b)).or_insert_with(|| computed.clone());
        if entry.prec() < computed.prec() {
            *entry = computed.clone();
        }
        computed
    }

    fn primitive_delta(&self, prec: usize) -> QSeries {
        // cached under the monomial key (1, 0, 0) via direct construction
        if let Some(s) = self.monomials.lock().unwrap().get(&(1, 0, 0)) {
            if s.prec() >= prec {
                return s.truncate(prec);
            }
        }
        let d = delta_series(prec);
        self.monomials.lock().unwrap().insert((1, 0, 0), d.clone());
        d
    }

    fn primitive_e4(&self, prec: usize) -> QSeries {
        if let Some(s) = self.monomials.lock().unwrap().get(&(0, 1, 0)) {
            if s.prec() >= prec {
                return s.truncate(prec);
            }
        }
        let e = eisenstein(4, prec).expect("weight 4 is valid");
        self.monomials.lock().unwrap().insert((0, 1, 0), e.clone());
        e
    }

    fn primitive_e6(&self, prec: usize) -> QSeries {
        if let Some(s) = self.monomials.lock().unwrap().get(&(0, 0, 1)) {
            if s.prec() >= prec {
                return s.truncate(prec);
            }
        }
        let e = eisenstein(6, prec).expect("weight 6 is valid");
        self.monomials.lock().unwrap().insert((0, 0, 1), e.clone());
        e
    }

    /// The Miller (echelon) basis of `M_k` to at least `prec` coefficients:
    /// integer series `g_0, …, g_{d−1}` with `a_i(g_j) = δ_{ij}`.
    pub fn basis(&self, k: i64, prec: usize) -> Result<Vec<QSeries>> {
        let d = dim_mk(k);
        if d == 0 {
            return Ok(Vec::new());
        }
        let prec = prec.max(d);
        if let Some(b) = self.bases.lock().unwrap().get(&k) {
            if b[0].prec() >= prec {
                return Ok(b.iter().map(|s| s.truncate(prec)).collect());
            }
        }

        // Monomial spanning set: f_j = Δ^j E_4^a E_6^b of weight k, which is
        // unitriangular in its first d coefficients (a_j(f_j) = 1,
        // a_i(f_j) = 0 for i < j).
        let mut fs: Vec<QSeries> = Vec::with_capacity(d);
        for j in 0..d {
            let w = k - 12 * (j as i64);
            let (a, b) = e4_e6_exponents(w);
            let f = self.monomial(j as u32, a, b, prec).with_weight(Some(k));
            debug_assert!(f.coeff(j).is_one(), "leading coefficient of f_{j}");
            fs.push(f);
        }
        // Back-substitution to the echelon form g_j = f_j − Σ_{m>j} a_m(f_j) g_m.
        let mut gs: Vec<Option<QSeries>> = vec![None; d];
        for j in (0..d).rev() {
            let mut g = fs[j].clone();
            for m in (j + 1)..d {
                let c = g.coeff(m).clone();
                if !c.is_zero() {
                    g = g.sub(&gs[m].as_ref().unwrap().scale(&c));
                }
            }
            gs[j] = Some(g.with_weight(Some(k)));
        }
        let gs: Vec<QSeries> = gs.into_iter().map(Option::unwrap).collect();
        for (j, g) in gs.iter().enumerate() {
            for i in 0..d {
                debug_assert_eq!(
                    *g.coeff(i),
                    if i == j { Rat::one() } else { Rat::zero() },
                    "echelon property at ({i},{j})"
                );
            }
        }

        let mut memo = self.bases.lock().unwrap();
        let replace = memo.get(&k).map_or(true, |b| b[0].prec() < prec);
        if replace {
            memo.insert(k, gs.clone());
        }
        Ok(gs)
    }

    /// Miller coordinates of a q-expansion known to lie in `M_k` — its
    /// first `dim M_k` coefficients. The remaining available coefficients
    /// are verified against the basis reconstruction, so a series that is
    /// not actually modular (at this precision) is rejected.
    pub fn coords_of_series(&self, k: i64, f: &QSeries) -> Result<Vec<Rat>> {
        let d = dim_mk(k);
        if d == 0 {
            if f.is_zero() {
                return Ok(Vec::new());
            }
            return Err(Error::assertion(format!(
                "nonzero series claimed to lie in the zero space M_{k}"
            )));
        }
        if f.prec() < d {
            return Err(Error::invalid(format!(
                "series precision {} below dim M_{k} = {d}",
                f.prec()
            )));
        }
        let coords: Vec<Rat> = (0..d).map(|i| f.coeff(i).clone()).collect();
        let basis = self.basis(k, f.prec())?;
        let mut recon = QSeries::zero(f.prec());
        for (c, g) in coords.iter().zip(&basis) {
            recon = recon.add(&g.scale(c));
        }
        if recon.coeffs() != f.coeffs() {
            return Err(Error::assertion(format!(
                "series does not lie in M_{k} at precision {}",
                f.prec()
            )));
        }
        Ok(coords)
    }

    /// The q-expansion of the form with the given Miller coordinates.
    pub fn series_of_coords(&self, k: i64, coords: &[Rat], prec: usize) -> Result<QSeries> {
        let d = dim_mk(k);
        if coords.len() != d {
            return Err(Error::invalid(format!(
                "coordinate length {} != dim M_{k} = {d}",
                coords.len()
            )));
        }
        let mut out = QSeries::zero(prec.max(1)).with_weight(Some(k));
        for (c, g) in coords.iter().zip(self.basis(k, prec)?) {
            out = out.add(&g.scale(c)).with_weight(Some(k));
        }
        Ok(out)
    }

    /// Matrix of `T_n` on the Miller basis of `M_k` (production route:
    /// coefficient formula at primes, Hecke recursions at composites;
    /// memoized and disk-cached).
    pub fn hecke_matrix(&self, k: i64, n: u64) -> Result<Mat<Rat>> {
        if n == 0 {
            return Err(Error::invalid("Hecke index n must be >= 1".to_string()));
        }
        let d = dim_mk(k);
        if d == 0 {
            return Ok(Mat::zeros(0, 0));
        }
        if n == 1 {
            return Ok(Mat::identity(d));
        }
        if let Some(m) = self.matrices.lock().unwrap().get(&(k, n)) {
            return Ok(m.clone());
        }
        if let Some(m) = self.cache_read(k, n) {
            self.matrices.lock().unwrap().insert((k, n), m.clone());
            return Ok(m);
        }

        let mat = if is_prime(n) {
            self.hecke_prime_matrix(k, n)?
        } else {
            // Recursions: split off one prime power.
            let l = (2..=n).find(|&l| n % l == 0 && is_prime(l)).expect("n >= 2 has a prime factor");
            let mut lr = 1u64;
            while n % (lr * l) == 0 {
                lr *= l;
            }
            let m = n / lr; // coprime part
            if m > 1 {
                // T_{l^r · m} = T_{l^r} T_m, (l^r, m) = 1
                self.hecke_matrix(k, lr)?.mul(&self.hecke_matrix(k, m)?)
            } else {
                // pure prime power l^r, r >= 2:
                // T_{l^r} = T_l T_{l^{r-1}} − l^{k−1} T_{l^{r-2}}
                let tl = self.hecke_matrix(k, l)?;
                let t1 = self.hecke_matrix(k, lr / l)?;
                let t0 = self.hecke_matrix(k, lr / (l * l))?;
                tl.mul(&t1).sub(&t0.scalar_mul(&prime_power_rat(l, k - 1)))
            }
        };

        self.cache_write(k, n, &mat);
        self.matrices.lock().unwrap().insert((k, n), mat.clone());
        Ok(mat)
    }

    /// Matrix of `T_ℓ` (ℓ prime) from the coefficient formula
    /// `a_m(T_ℓ f) = a_{ℓm}(f) + ℓ^{k−1} a_{m/ℓ}(f)`.
    fn hecke_prime_matrix(&self, k: i64, l: u64) -> Result<Mat<Rat>> {
        let d = dim_mk(k);
        let prec = (l as usize) * d + 1;
        let basis = self.basis(k, prec)?;
        let lk = prime_power_rat(l, k - 1);
        Ok(Mat::from_fn(d, d, |i, j| {
            let g = &basis[j];
            let mut c = g.coeff((l as usize) * i).clone();
            if (i as u64) % l == 0 {
                c += &lk * g.coeff(i / l as usize);
            }
            c
        }))
    }

    /// Matrix of `T_n` from the closed divisor-sum formula
    /// `a_m(T_n f) = Σ_{e | gcd(m,n)} e^{k−1} a_{mn/e²}(f)` — an
    /// independent route sharing no code with the recursions, used to make
    /// the Hecke-relation checks non-vacuous. Not cached.
    pub fn hecke_matrix_direct(&self, k: i64, n: u64) -> Result<Mat<Rat>> {
        if n == 0 {
            return Err(Error::invalid("Hecke index n must be >= 1".to_string()));
        }
        let d = dim_mk(k);
        if d == 0 {
            return Ok(Mat::zeros(0, 0));
        }
        let prec = (n as usize) * d + 1;
        let basis = self.basis(k, prec)?;
        Ok(Mat::from_fn(d, d, |i, j| {
            let g = &basis[j];
            let mut acc = Rat::zero();
            // e runs over divisors of gcd(i, n), with gcd(0, n) = n.
            let gcd = if i == 0 { n } else { (i as u64).gcd(&n) };
            for e in 1..=gcd {
                if gcd % e == 0 {
                    let idx = (i as u64) * n / (e * e);
                    acc += prime_power_rat(e, k - 1) * g.coeff(idx as usize);
                }
            }
            acc
        }))
    }

    // -- disk cache ---------------------------------------------------------

    fn cache_path(&self, k: i64, n: u64) -> Option<PathBuf> {
        self.cache_dir
            .as_ref()
            .map(|d| d.join(format!("hecke_k{k}_n{n}.json")))
    }

    /// Read a cached matrix; any failure (missing, unreadable, malformed,
    /// wrong shape) yields `None` and the caller recomputes.
    fn cache_read(&self, k: i64, n: u64) -> Option<Mat<Rat>> {
        let path = self.cache_path(k, n)?;
        let text = std::fs::read_to_string(path).ok()?;
        let v: Value = serde_json::from_str(&text).ok()?;
        if v["weight"] != json!(k) || v["index"] != json!(n) {
            return None;
        }
        let d = dim_mk(k);
        let rows = v["entries"].as_array()?;
        if rows.len() != d {
            return None;
        }
        let mut m = Mat::zeros(d, d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array()?;
            if row.len() != d {
                return None;
            }
            for (j, e) in row.iter().enumerate() {
                m.set(i, j, e.as_str()?.parse().ok()?);
            }
        }
        Some(m)
    }

    /// Write a matrix to the cache via a temp file + atomic rename; IO
    /// failures are swallowed (the cache is an optimization only).
    fn cache_write(&self, k: i64, n: u64, m: &Mat<Rat>) {
        let Some(path) = self.cache_path(k, n) else {
            return;
        };
        let Some(dir) = path.parent() else { return };
        if std::fs::create_dir_all(dir).is_err() {
            return;
        }
        let payload = hecke_matrix_json(k, n, m).to_string();
        let tmp = dir.join(format!(".tmp_hecke_k{k}_n{n}_{}", std::process::id()));
        if std::fs::write(&tmp, payload).is_ok() {
            let _ = std::fs::rename(&tmp, &path);
        }
    }
}

impl Default for HeckeContext {
    fn default() -> Self {
        HeckeContext::new()
    }
}

/// CLI-facing JSON for a Hecke matrix:
/// `{"weight": k, "index": n, "entries": [["num/den", …], …]}`.
pub fn hecke_matrix_json(k: i64, n: u64, m: &Mat<Rat>) -> Value {
    let entries: Vec<Vec<String>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m.get(i, j).to_string()).collect())
        .collect();
    json!({"weight": k, "index": n, "entries": entries})
}

// ---------------------------------------------------------------------------
// Multiplication operators
// ---------------------------------------------------------------------------

/// Matrix (in Miller coordinates) of multiplication by a fixed form:
/// `M_k → M_{k+w}`, `f ↦ f·h`, where `h` has weight tag `w`. Needs only
/// `dim M_{k+w} + 1` coefficients of everything involved.
pub fn mult_matrix(ctx: &HeckeContext, k: i64, h: &QSeries) -> Result<Mat<Rat>> {
    let w = h
        .weight()
        .ok_or_else(|| Error::invalid("multiplier series carries no weight tag".to_string()))?;
    let k_to = k + w;
    let d_from = dim_mk(k);
    let d_to = dim_mk(k_to);
    if d_from == 0 || d_to == 0 {
        return Ok(Mat::zeros(d_to, d_from));
    }
    let prec = d_to + 1;
    if h.prec() < prec {
        return Err(Error::invalid(format!(
            "multiplier precision {} below dim M_{k_to} + 1 = {prec}",
            h.prec()
        )));
    }
    let basis = ctx.basis(k, prec)?;
    let mut m = Mat::zeros(d_to, d_from);
    for (j, g) in basis.iter().enumerate() {
        let prod = g.mul(&h.truncate(prec));
        let coords = ctx.coords_of_series(k_to, &prod)?;
        for (i, c) in coords.into_iter().enumerate() {
            m.set(i, j, c);
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Eigencharacters
// ---------------------------------------------------------------------------

/// Eisenstein or cuspidal system of Hecke eigenvalues.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub enum CharKind {
    Eisenstein,
    Cuspidal,
}

/// A system of simultaneous Hecke eigenvalues on `M_k`, with its exact
/// eigenvector in Miller coordinates (over `Q` or a quadratic extension).
#[derive(Clone, Debug)]
pub struct Eigencharacter {
    pub weight: i64,
    pub kind: CharKind,
    /// 0 for rational characters, else the squarefree-reduced discriminant
    /// of the quadratic eigenvalue field.
    pub disc: Int,
    /// `λ(T_ℓ)` at each requested prime.
    pub values: BTreeMap<u64, Quad>,
    /// Eigenvector in Miller coordinates, normalized `a_0 = 1` (Eisenstein)
    /// or `a_1 = 1` (cuspidal).
    pub eigenvector: Vec<Quad>,
    /// The monic integer factor of the `T_2` characteristic polynomial this
    /// character came from (`[1, c_1, …]`; length 2 or 3). Eisenstein
    /// characters store the linear factor `x − (1 + 2^{k−1})`.
    pub charpoly_factor: Vec<Int>,
    /// Index of the chosen root of `charpoly_factor` (0: `+√d` branch).
    pub root_index: usize,
}

impl Eigencharacter {
    /// λ(T_ℓ); the prime must have been requested at construction.
    pub fn value(&self, l: u64) -> &Quad {
        self.values
            .get(&l)
            .unwrap_or_else(|| panic!("eigenvalue at ℓ={l} was not computed"))
    }

    /// A short stable label, used for ordering and display.
    pub fn label(&self) -> String {
        match self.kind {
            CharKind::Eisenstein => format!("eis{}", self.weight),
            CharKind::Cuspidal => {
                if self.disc.is_zero() {
                    format!("cusp{}#{}", self.weight, self.root_index)
                } else {
                    format!("cusp{}#sqrt{}({})", self.weight, self.disc, self.root_index)
                }
            }
        }
    }
}

/// Result of eigencharacter enumeration at one weight: the characters with
/// exact eigendata, plus any characteristic-polynomial factors of degree ≥ 3
/// that are reported unresolved rather than guessed.
#[derive(Clone, Debug)]
pub struct EigencharacterList {
    pub weight: i64,
    pub characters: Vec<Eigencharacter>,
    /// Monic integer coefficient lists of unenumerated factors (degree ≥ 3).
    pub unresolved_factors: Vec<Vec<Int>>,
}

impl EigencharacterList {
    /// True iff every character at this weight was enumerated exactly.
    pub fn complete(&self) -> bool {
        self.unresolved_factors.is_empty()
    }
}

/// Enumerate the eigencharacters of `M_k`: the Eisenstein character
/// (`λ(T_ℓ) = 1 + ℓ^{k−1}`; at `k = 0` this is the action `1 + 1/ℓ` on
/// constants) plus one cuspidal character per irreducible factor of the
/// characteristic polynomial of `T_2` on the cusp subspace. Factors of
/// degree ≤ 2 are solved exactly (quadratic fields as `a + b√d`); higher
/// degrees land in `unresolved_factors`.
pub fn eigencharacters(
    ctx: &HeckeContext,
    k: i64,
    primes: &[u64],
) -> Result<EigencharacterList> {
    for &l in primes {
        if !is_prime(l) {
            return Err(Error::invalid(format!("{l} is not prime")));
        }
    }
    let d = dim_mk(k);
    let mut characters = Vec::new();
    let mut unresolved = Vec::new();
    if d == 0 {
        return Ok(EigencharacterList {
            weight: k,
            characters,
            unresolved_factors: unresolved,
        });
    }

    // Eisenstein character: eigenvector = E_k in Miller coordinates (the
    // constant 1 at weight 0), eigenvalue 1 + ℓ^{k−1}.
    {
        let eigenvector: Vec<Quad> = if k == 0 {
            vec![Quad::from_i64(1)]
        } else {
            let e = eisenstein(k, d + 1)?;
            ctx.coords_of_series(k, &e)?
                .into_iter()
                .map(Quad::from_rat)
                .collect()
        };
        let mut values = BTreeMap::new();
        for &l in primes {
            let lam = Rat::one() + prime_power_rat(l, k - 1);
            values.insert(l, Quad::from_rat(lam));
        }
        // linear factor x − (1 + 2^{k−1}); at k = 0 the eigenvalue 3/2 is
        // not an algebraic integer, so no integer factor is recorded.
        let two_val = Rat::one() + prime_power_rat(2, k - 1);
        let charpoly_factor = if two_val.is_integer() {
            vec![Int::one(), -two_val.to_integer()]
        } else {
            Vec::new()
        };
        characters.push(Eigencharacter {
            weight: k,
            kind: CharKind::Eisenstein,
            disc: Int::zero(),
            values,
            eigenvector,
            charpoly_factor,
            root_index: 0,
        });
    }

    // Cusp subspace: Miller coordinates 1.. (a_0 = 0). It is T_n-invariant
    // since a_0(T_n f) = σ_{k−1}(n) a_0(f).
    let dc = d - 1;
    if dc > 0 {
        let t2 = ctx.hecke_matrix(k, 2)?;
        let c2 = Mat::from_fn(dc, dc, |i, j| t2.get(i + 1, j + 1).clone());
        let chi = crate::linalg::charpoly(&c2);
        let chi_int: Vec<Int> = chi
            .iter()
            .map(|c| {
                debug_assert!(c.is_integer(), "cusp charpoly must be integral");
                c.to_integer()
            })
            .collect();
        let (factors, bad) = factor_monic_deg_le2(&chi_int);
        unresolved.extend(bad);
        for f in factors {
            for (root_index, lam2) in roots_of_factor(&f).into_iter().enumerate() {
                let ev = cuspidal_eigenvector(k, &t2, &lam2)?;
                let mut values = BTreeMap::new();
                for &l in primes {
                    values.insert(l, eigenvalue_on(ctx, k, l, &ev)?);
                }
                characters.push(Eigencharacter {
                    weight: k,
                    kind: CharKind::Cuspidal,
                    disc: lam2.disc().clone(),
                    values,
                    eigenvector: ev,
                    charpoly_factor: f.clone(),
                    root_index,
                });
            }
        }
    }

    Ok(EigencharacterList {
        weight: k,
        characters,
        unresolved_factors: unresolved,
    })
}

fn int_of(r: &Rat) -> Int {
    debug_assert!(r.is_integer());
    r.to_integer()
}

/// The roots of a monic integer factor of degree 1 or 2, as exact `Quad`
/// scalars (a conjugate pair for an irreducible quadratic).
fn roots_of_factor(f: &[Int]) -> Vec<Quad> {
    match f.len() {
        2 => vec![Quad::from_rat(Rat::from_integer(-f[1].clone()))],
        3 => {
            // x² + bx + c: roots (−b ± √(b² − 4c))/2
            let b = Rat::from_integer(f[1].clone());
            let c = Rat::from_integer(f[2].clone());
            let disc = &b * &b - rat(4) * &c;
            debug_assert!(!disc.is_zero(), "repeated cuspidal eigenvalue");
            let disc_int = int_of(&disc);
            let (m, d0) = strip_square_factors(&disc_int);
            let half = crate::arith::ratio(1, 2);
            if d0.is_one() {
                // rational pair (b² − 4c a perfect square)
                let mr = Rat::from_integer(m);
                vec![
                    Quad::from_rat((-&b + &mr) * &half),
                    Quad::from_rat((-&b - &mr) * &half),
                ]
            } else {
                let mh = Rat::from_integer(m) * &half;
                vec![
                    Quad::new(-&b * &half, mh.clone(), d0.clone()),
                    Quad::new(-&b * &half, -mh, d0),
                ]
            }
        }
        _ => unreachable!("factor degree must be 1 or 2"),
    }
}

/// The unique (asserted) `T_2`-eigenvector in the cusp subspace for the
/// eigenvalue `λ₂`, as full Miller coordinates normalized to `a_1 = 1`.
fn cuspidal_eigenvector(k: i64, t2: &Mat<Rat>, lam2: &Quad) -> Result<Vec<Quad>> {
    let d = dim_mk(k);
    let dc = d - 1;
    let c2 = Mat::from_fn(dc, dc, |i, j| Quad::from_rat(t2.get(i + 1, j + 1).clone()));
    let shifted = c2.sub(&Mat::<Quad>::identity(dc).scalar_mul(lam2));
    let ker = kernel_basis(&shifted);
    if ker.len() != 1 {
        return Err(Error::assertion(format!(
            "T_2 eigenspace for {lam2} at weight {k} has dimension {}, expected 1",
            ker.len()
        )));
    }
    let v = &ker[0];
    if v[0].is_zero() {
        return Err(Error::assertion(format!(
            "cusp eigenvector at weight {k} has a_1 = 0; cannot normalize"
        )));
    }
    let scale = v[0].inv();
    let mut coords = vec![Quad::from_i64(0); d];
    for (i, x) in v.iter().enumerate() {
        coords[i + 1] = x.mul_ref(&scale);
    }
    Ok(coords)
}

/// The eigenvalue of `T_ℓ` on a given eigenvector (Miller coordinates over
/// a quadratic extension), asserting the vector really is an eigenvector.
pub fn eigenvalue_on(ctx: &HeckeContext, k: i64, l: u64, v: &[Quad]) -> Result<Quad> {
    let t = ctx.hecke_matrix(k, l)?.to_quad();
    let w = t.apply(v);
    let pivot = v
        .iter()
        .position(|x| !x.is_zero())
        .ok_or_else(|| Error::assertion("zero eigenvector".to_string()))?;
    let lam = w[pivot].div_ref(&v[pivot]);
    for (wi, vi) in w.iter().zip(v) {
        if *wi != lam.mul_ref(vi) {
            return Err(Error::assertion(format!(
                "claimed eigenvector is not an eigenvector of T_{l} at weight {k}"
            )));
        }
    }
    Ok(lam)
}

// ---------------------------------------------------------------------------
// Integer polynomial factorization (degree ≤ 2 exact, higher best-effort)
// ---------------------------------------------------------------------------

/// Split a monic integer polynomial (coefficients `[1, c_1, …, c_n]`) into
/// monic factors of degree ≤ 2 where possible. Integer roots of high-degree
/// polynomials are searched among divisors of the constant term (best
/// effort, capped trial division); anything that does not split down to
/// degree ≤ 2 is returned in the second list, unresolved — reported, never
/// guessed.
fn factor_monic_deg_le2(coeffs: &[Int]) -> (Vec<Vec<Int>>, Vec<Vec<Int>>) {
    let mut done = Vec::new();
    let mut unresolved = Vec::new();
    let mut work = vec![coeffs.to_vec()];
    while let Some(p) = work.pop() {
        let deg = p.len() - 1;
        if deg == 0 {
            continue;
        }
        if deg <= 2 {
            done.push(p);
            continue;
        }
        // x | p?
        if p[deg].is_zero() {
            done.push(vec![Int::one(), Int::zero()]);
            work.push(p[..deg].to_vec());
            continue;
        }
        match find_integer_root(&p) {
            Some(r) => {
                done.push(vec![Int::one(), -r.clone()]);
                work.push(deflate(&p, &r));
            }
            None => unresolved.push(p),
        }
    }
    (done, unresolved)
}

/// Horner evaluation of a monic integer polynomial at an integer.
fn poly_eval(p: &[Int], x: &Int) -> Int {
    let mut acc = Int::zero();
    for c in p {
        acc = acc * x + c;
    }
    acc
}

/// Synthetic division of `p` by `(x − r)` (exact; `r` must be a root).
fn deflate(p: &[Int], r: &Int) -> Vec<Int> {
    let mut out = Vec::with_capacity(p.len() - 1);
    let mut acc = Int::zero();
    for c in &p[..p.len() - 1] {
        acc = acc * r + c;
        out.push(acc.clone());
    }
    debug_assert!((acc * r + &p[p.len() - 1]).is_zero());
    out
}

/// Search for an integer root among divisors of the constant term. Trial
/// division is capped at 10⁵; if the cofactor stays composite, only the
/// divisors built from the found primes (and the cofactor itself) are
/// tried, so a miss is possible — callers treat a miss as "unresolved",
/// never as "irreducible".
fn find_integer_root(p: &[Int]) -> Option<Int> {
    let c0 = p[p.len() - 1].abs();
    debug_assert!(!c0.is_zero());
    let mut primes: Vec<(Int, u32)> = Vec::new();
    let mut rest = c0.clone();
    let mut q = Int::from(2);
    let cap = Int::from(100_000u64);
    while &q * &q <= rest && q <= cap {
        let mut e = 0u32;
        loop {
            let (quot, rem) = rest.div_rem(&q);
            if rem.is_zero() {
                rest = quot;
                e += 1;
            } else {
                break;
            }
        }
        if e > 0 {
            primes.push((q.clone(), e));
        }
        q += 1;
    }
    if !rest.is_one() {
        primes.push((rest, 1));
    }
    let mut divisors = vec![Int::one()];
    for (q, e) in &primes {
        let mut next = Vec::new();
        for d in &divisors {
            let mut f = Int::one();
            for _ in 0..=*e {
                next.push(d * &f);
                f *= q;
            }
        }
        divisors = next;
        if divisors.len() > 4096 {
            break; // cap the search; stay honest via the unresolved path
        }
    }
    divisors.sort();
    divisors.dedup();
    for d in divisors {
        for cand in [d.clone(), -d] {
            if poly_eval(p, &cand).is_zero() {
                return Some(cand);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Commuting homomorphisms / weight separation
// ---------------------------------------------------------------------------

/// Matrix of the linear map `F ↦ T_to·F − F·T_from` on `Hom(M_from, M_to)`
/// with `F` vectorized row-major (`vec(F)[i·d_from + j] = F_{ij}`).
pub fn hom_commutator_matrix(t_to: &Mat<Rat>, t_from: &Mat<Rat>) -> Mat<Rat> {
    let dt = t_to.nrows();
    let df = t_from.nrows();
    Mat::from_fn(dt * df, dt * df, |row, col| {
        let (i, j) = (row / df, row % df);
        let (r, s) = (col / df, col % df);
        let mut v = Rat::zero();
        if s == j {
            v += t_to.get(i, r);
        }
        if r == i {
            v -= t_from.get(s, j);
        }
        v
    })
}

/// Dimension of the space of maps `F: M_from → M_to` commuting with every
/// `T_ℓ`, `ℓ` in `primes`. Weight separation predicts 0 whenever
/// `from ≠ to`.
pub fn commuting_homs_dimension(
    ctx: &HeckeContext,
    k_from: i64,
    k_to: i64,
    primes: &[u64],
) -> Result<usize> {
    let df = dim_mk(k_from);
    let dt = dim_mk(k_to);
    if df == 0 || dt == 0 {
        return Ok(0);
    }
    let mut stacked: Option<Mat<Rat>> = None;
    for &l in primes {
        let rows = hom_commutator_matrix(&ctx.hecke_matrix(k_to, l)?, &ctx.hecke_matrix(k_from, l)?);
        stacked = Some(match stacked {
            None => rows,
            Some(s) => s.vstack(&rows),
        });
    }
    let stacked = stacked.ok_or_else(|| Error::invalid("empty prime list".to_string()))?;
    Ok(kernel_basis(&stacked).len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    fn ctx() -> HeckeContext {
        HeckeContext::with_cache_dir(None)
    }

    #[test]
    fn dimensions() {
        // dim M_k for k = 0, 2, 4, …: 1,0,1,1,1,1,2,1,2,2,2,2,3,…
        let expected = [
            (0, 1),
            (2, 0),
            (4, 1),
            (6, 1),
            (8, 1),
            (10, 1),
            (12, 2),
            (14, 1),
            (16, 2),
            (18, 2),
            (20, 2),
            (22, 2),
            (24, 3),
            (26, 2),
            (28, 3),
            (-4, 0),
            (7, 0),
        ];
        for (k, d) in expected {
            assert_eq!(dim_mk(k), d, "dim M_{k}");
        }
    }

    #[test]
    fn miller_basis_echelon_property() {
        let c = ctx();
        for k in [0i64, 4, 12, 16, 24, 26, 28] {
            let d = dim_mk(k);
            let basis = c.basis(k, d + 5).unwrap();
            assert_eq!(basis.len(), d);
            for (j, g) in basis.iter().enumerate() {
                assert_eq!(g.weight(), Some(k));
                for i in 0..d {
                    let expected = if i == j { rat(1) } else { rat(0) };
                    assert_eq!(*g.coeff(i), expected, "k={k} a_{i}(g_{j})");
                }
                // integrality of the echelon basis
                for c in g.coeffs() {
                    assert!(c.is_integer(), "k={k}: non-integer basis coefficient");
                }
            }
        }
    }

    #[test]
    fn miller_basis_k12_and_k16() {
        let c = ctx();
        // k = 12: g_1 = Δ
        let b12 = c.basis(12, 6).unwrap();
        assert_eq!(b12[1].coeffs(), delta_series(6).coeffs());
        // k = 16: g_1 = E_4·Δ (already echelon)
        let b16 = c.basis(16, 4).unwrap();
        assert_eq!(b16[1].coeffs(), &[rat(0), rat(1), rat(216), rat(-3348)]);
    }

    #[test]
    fn coords_round_trip_and_rejection() {
        let c = ctx();
        let e4 = eisenstein(4, 10).unwrap();
        let f = e4.pow(3); // E_4³ ∈ M_12
        let coords = c.coords_of_series(12, &f).unwrap();
        assert_eq!(coords, vec![rat(1), rat(720)]);
        let back = c.series_of_coords(12, &coords, 10).unwrap();
        assert_eq!(back.coeffs(), f.coeffs());
        // a non-modular series is rejected
        let fake = QSeries::new(vec![rat(1), rat(720), rat(0), rat(0)], Some(12));
        assert!(c.coords_of_series(12, &fake).is_err());
    }

    #[test]
    fn hecke_t2_weight12() {
        // T_2 on the Miller basis of M_12 is [[2049, 0], [196560, −24]]:
        // Eisenstein eigenvalue 1 + 2^11, τ(2) = −24, and
        // a_1(T_2 g_0) = a_2(g_0) = 196560.
        let c = ctx();
        let t2 = c.hecke_matrix(12, 2).unwrap();
        assert_eq!(t2.get(0, 0), &rat(2049));
        assert_eq!(t2.get(0, 1), &rat(0));
        assert_eq!(t2.get(1, 0), &rat(196560));
        assert_eq!(t2.get(1, 1), &rat(-24));
        // eigenvalues via the characteristic polynomial
        let chi = crate::linalg::charpoly(&t2);
        // (x − 2049)(x + 24) = x² − 2025x − 49176
        assert_eq!(chi, vec![rat(1), rat(-2025), rat(-49176)]);
    }

    #[test]
    fn hecke_identity_and_composite() {
        let c = ctx();
        assert_eq!(c.hecke_matrix(12, 1).unwrap(), Mat::identity(2));
        // T_6 = T_2 T_3
        let t6 = c.hecke_matrix(12, 6).unwrap();
        let prod = c.hecke_matrix(12, 2).unwrap().mul(&c.hecke_matrix(12, 3).unwrap());
        assert_eq!(t6, prod);
    }

    #[test]
    fn hecke_direct_route_agrees() {
        let c = ctx();
        for k in [12i64, 16, 26] {
            for n in [1u64, 2, 4, 6, 9, 12] {
                assert_eq!(
                    c.hecke_matrix(k, n).unwrap(),
                    c.hecke_matrix_direct(k, n).unwrap(),
                    "k={k}, n={n}"
                );
            }
        }
    }

    #[test]
    fn hecke_weight0() {
        // On constants T_ℓ acts by 1 + 1/ℓ.
        let c = ctx();
        let t5 = c.hecke_matrix(0, 5).unwrap();
        assert_eq!(t5.get(0, 0), &ratio(6, 5));
    }

    #[test]
    fn hecke_commutativity() {
        let c = ctx();
        for (m, n) in [(2u64, 3u64), (4, 9), (6, 5), (8, 3)] {
            let a = c.hecke_matrix(12, m).unwrap();
            let b = c.hecke_matrix(12, n).unwrap();
            assert_eq!(a.mul(&b), b.mul(&a), "T_{m} T_{n}");
        }
    }

    #[test]
    fn eigencharacters_weight12() {
        let c = ctx();
        let list = eigencharacters(&c, 12, &[2, 3, 5, 7]).unwrap();
        assert!(list.complete());
        assert_eq!(list.characters.len(), 2);
        let eis = &list.characters[0];
        assert_eq!(eis.kind, CharKind::Eisenstein);
        assert_eq!(eis.value(2).as_rat(), Some(&rat(2049)));
        assert_eq!(eis.value(3).as_rat(), Some(&rat(177148))); // 1 + 3^11
        let cusp = &list.characters[1];
        assert_eq!(cusp.kind, CharKind::Cuspidal);
        // τ(2) = −24, τ(3) = 252, τ(5) = 4830, τ(7) = −16744
        assert_eq!(cusp.value(2).as_rat(), Some(&rat(-24)));
        assert_eq!(cusp.value(3).as_rat(), Some(&rat(252)));
        assert_eq!(cusp.value(5).as_rat(), Some(&rat(4830)));
        assert_eq!(cusp.value(7).as_rat(), Some(&rat(-16744)));
        // eigenvector is Δ: coords (0, 1)
        assert_eq!(cusp.eigenvector, vec![Quad::from_i64(0), Quad::from_i64(1)]);
    }

    #[test]
    fn eigencharacters_weight0() {
        let c = ctx();
        let list = eigencharacters(&c, 0, &[2, 5]).unwrap();
        assert_eq!(list.characters.len(), 1);
        assert_eq!(list.characters[0].value(2).as_rat(), Some(&ratio(3, 2)));
        assert_eq!(list.characters[0].value(5).as_rat(), Some(&ratio(6, 5)));
    }

    #[test]
    fn eigencharacters_weight24_quadratic_field() {
        // S_24 has the quadratic Hecke field Q(√144169):
        // λ(T_2) = 540 ± 12√144169.
        let c = ctx();
        let list = eigencharacters(&c, 24, &[2, 3]).unwrap();
        assert!(list.complete());
        assert_eq!(list.characters.len(), 3);
        let quads: Vec<&Eigencharacter> = list
            .characters
            .iter()
            .filter(|ch| ch.kind == CharKind::Cuspidal)
            .collect();
        assert_eq!(quads.len(), 2);
        for (idx, ch) in quads.iter().enumerate() {
            assert_eq!(ch.disc, Int::from(144169));
            let lam = ch.value(2);
            assert_eq!(lam.ra(), &rat(540));
            let expected_b = if idx == 0 { rat(12) } else { rat(-12) };
            assert_eq!(lam.rb(), &expected_b);
            // a_1 normalization
            assert_eq!(ch.eigenvector[1], Quad::from_i64(1));
        }
        // T_2 charpoly factor: x² − 1080x − 20468736
        assert_eq!(
            quads[0].charpoly_factor,
            vec![Int::one(), Int::from(-1080), Int::from(-20468736)]
        );
    }

    #[test]
    fn eigencharacters_weight26() {
        // dim S_26 = 1: Eisenstein + one rational cuspidal character.
        let c = ctx();
        let list = eigencharacters(&c, 26, &[2]).unwrap();
        assert!(list.complete());
        assert_eq!(list.characters.len(), 2);
        assert_eq!(list.characters[1].kind, CharKind::Cuspidal);
        // a_2 of the normalized weight-26 cusp form is −48
        assert_eq!(list.characters[1].value(2).as_rat(), Some(&rat(-48)));
    }

    #[test]
    fn eigencharacter_distinctness() {
        let c = ctx();
        for k in (12i64..=28).step_by(2) {
            let list = eigencharacters(&c, k, &[2, 3, 5, 7]).unwrap();
            for (i, a) in list.characters.iter().enumerate() {
                for b in list.characters.iter().skip(i + 1) {
                    assert!(
                        [2u64, 3, 5, 7].iter().any(|l| a.value(*l) != b.value(*l)),
                        "indistinguishable characters at weight {k}"
                    );
                }
            }
        }
    }

    #[test]
    fn mult_by_e4_matrix() {
        // M_12 → M_16 by E_4: Δ ↦ E_4Δ = g_1^{(16)}, so column 1 is (0, 1).
        let c = ctx();
        let e4 = eisenstein(4, 10).unwrap();
        let m = mult_matrix(&c, 12, &e4).unwrap();
        assert_eq!(m.nrows(), 2);
        assert_eq!(m.ncols(), 2);
        assert_eq!(m.get(0, 1), &rat(0));
        assert_eq!(m.get(1, 1), &rat(1));
    }

    #[test]
    fn weight_separation() {
        // No nonzero Hecke-equivariant maps between distinct weights.
        let c = ctx();
        let primes = [2u64, 3, 7, 11, 13];
        for (from, to) in [(12i64, 16i64), (12, 24), (16, 28), (12, 32)] {
            assert_eq!(
                commuting_homs_dimension(&c, from, to, &primes).unwrap(),
                0,
                "{from} → {to}"
            );
        }
        // sanity: from a weight to itself the identity commutes
        assert!(commuting_homs_dimension(&c, 12, 12, &primes).unwrap() >= 1);
    }

    #[test]
    fn polynomial_factor_helpers() {
        // (x − 2)(x + 3)(x − 5) = x³ − 4x² − 11x + 30
        let p = vec![Int::from(1), Int::from(-4), Int::from(-11), Int::from(30)];
        let (factors, unresolved) = factor_monic_deg_le2(&p);
        assert!(unresolved.is_empty());
        // splits into a linear and remaining quadratic (order-dependent);
        // multiply factors back together to verify
        let mut prod = vec![Int::one()];
        for f in &factors {
            let mut next = vec![Int::zero(); prod.len() + f.len() - 1];
            for (i, a) in prod.iter().enumerate() {
                for (j, b) in f.iter().enumerate() {
                    let t = a * b;
                    next[i + j] += t;
                }
            }
            prod = next;
        }
        assert_eq!(prod, p);
    }

    #[test]
    fn hecke_cache_round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let c1 = HeckeContext::with_cache_dir(Some(dir.path().to_path_buf()));
        let t = c1.hecke_matrix(12, 2).unwrap();
        let path = dir.path().join("hecke_k12_n2.json");
        assert!(path.exists(), "cache file written");
        // a fresh context reads the cache
        let c2 = HeckeContext::with_cache_dir(Some(dir.path().to_path_buf()));
        assert_eq!(c2.hecke_matrix(12, 2).unwrap(), t);
        // corrupt the file: recomputation still yields the same matrix
        std::fs::write(&path, b"{ not json !!").unwrap();
        let c3 = HeckeContext::with_cache_dir(Some(dir.path().to_path_buf()));
        assert_eq!(c3.hecke_matrix(12, 2).unwrap(), t);
        // and the rewrite healed the file
        let c4 = HeckeContext::with_cache_dir(Some(dir.path().to_path_buf()));
        assert_eq!(c4.hecke_matrix(12, 2).unwrap(), t);
    }
}
