//! Elliptic-homology models of two-cell complexes and wedges of spheres,
//! the topological Hecke action on them, joint eigenforms, and extension
//! obstructions.
//!
//! The module attached to the cofiber of `p^j v_1^n α_1` in even degree
//! `2k` is the carrier `M_k ⊕ M_{k−(p−1)n}` (bottom cell, top cell). For
//! `ℓ ≠ p` and `j ≤ ν_p(n)` the Hecke action is block upper-triangular
//!
//! `T̃_ℓ(f_0, f_1) = (T_ℓ f_0 + p^j·Δ_n(T_ℓ) f_1, T_ℓ f_1)`,
//!
//! with classical diagonal blocks and off-diagonal block
//! `p^j·Δ_n(T_ℓ) = p^{j−1−ν_p(n)}(T_ℓ∘e^n − e^n∘T_ℓ)` — the same
//! matrices as the Hochschild cocycle `κ`, by one shared code path. For
//! `j > ν_p(n)` the complex splits as a wedge and the action is block
//! diagonal; at `ℓ = p` it is block diagonal for every `j`.
//!
//! Joint eigenforms are found two independent ways: by intersecting exact
//! eigenspaces of the stacked action (`joint_eigenforms`), and by writing
//! down the classification — bottom-supported `(f, 0)` for classical
//! eigenforms `f ∈ M_k`, and `(−g₀·E^n, p^{1+ν_p(n)−j}·g₀)` for classical
//! eigenforms `g₀ ∈ M_{k−(p−1)n}` (`classify_304jf`). Both canonicalize
//! eigenvectors identically (leading coordinate scanned top cell first,
//! then the minimal p-power making the whole vector primitive over
//! `Z_(p)`), so the two routes can be compared as exact lists.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num::{BigInt, Zero};

use crate::arith::{int_p_valuation, is_prime, rat, Rat, Valuation};
use crate::derived::{
    dotcup, is_coboundary_twisted, CommutatorContext, HochschildCochain1, TwistedCochain1,
};
use crate::error::Error;
use crate::linalg::{kernel_basis, Field, Mat, Quad};
use crate::modforms::{
    dim_mk, eigencharacters, prime_power_rat, CharKind, Eigencharacter, HeckeContext,
};
use crate::Result;

type Int = BigInt;

// ---------------------------------------------------------------------------
// Modules
// ---------------------------------------------------------------------------

/// The elliptic-homology module of the two-cell complex attached to
/// `p^j v_1^n α_1`, in the degree pairing weight `k` (bottom cell) with
/// `k − (p−1)n` (top cell). Vectors are laid out bottom coordinates first.
pub struct TwoCellModule<'h> {
    pub p: u64,
    pub n: u64,
    pub j: u32,
    /// bottom-cell weight `k`
    pub weight: i64,
    comm: CommutatorContext<'h>,
    /// memoized off-diagonal blocks `p^j·Δ_n(T_ℓ)`
    offdiag: Mutex<HashMap<u64, Mat<Rat>>>,
}

impl<'h> TwoCellModule<'h> {
    pub fn new(hecke: &'h HeckeContext, p: u64, n: u64, j: u32, weight: i64) -> Result<Self> {
        let comm = CommutatorContext::new(hecke, p, n)?;
        Ok(TwoCellModule {
            p,
            n,
            j,
            weight,
            comm,
            offdiag: Mutex::new(HashMap::new()),
        })
    }

    pub fn hecke(&self) -> &'h HeckeContext {
        self.comm.hecke()
    }

    pub fn comm(&self) -> &CommutatorContext<'h> {
        &self.comm
    }

    /// `ν_p(n)`.
    pub fn nu(&self) -> i64 {
        self.comm.nu()
    }

    /// Top-cell weight `k − (p−1)n`.
    pub fn top_weight(&self) -> i64 {
        self.weight - ((self.p - 1) * self.n) as i64
    }

    /// `(dim bottom, dim top)`.
    pub fn dims(&self) -> (usize, usize) {
        (dim_mk(self.weight), dim_mk(self.top_weight()))
    }

    /// True iff `j > ν_p(n)`, where the complex splits as a wedge and the
    /// action is block diagonal.
    pub fn is_wedge_split(&self) -> bool {
        (self.j as i64) > self.nu()
    }

    /// The off-diagonal block `p^j·Δ_n(T_ℓ): M_{k−(p−1)n} → M_k` (the
    /// Hochschild cocycle value scaled by `p^j`).
    pub fn offdiag_block(&self, l: u64) -> Result<Mat<Rat>> {
        if let Some(m) = self.offdiag.lock().unwrap().get(&l) {
            return Ok(m.clone());
        }
        let op = self.comm.hecke_op(l);
        let delta_n = self.comm.apply_delta_n(&op, self.top_weight())?;
        let block = delta_n.scalar_mul(&prime_power_rat(self.p, self.j as i64));
        self.offdiag.lock().unwrap().insert(l, block.clone());
        Ok(block)
    }

    /// The matrix of `T̃_ℓ` on `M_k ⊕ M_{k−(p−1)n}` for `ℓ ≠ p`:
    /// block upper-triangular with classical diagonal blocks, block
    /// diagonal in the wedge-split case `j > ν_p(n)`.
    pub fn action(&self, l: u64) -> Result<Mat<Rat>> {
        if !is_prime(l) {
            return Err(Error::invalid(format!("{l} is not prime")));
        }
        if l == self.p {
            return Err(Error::invalid(format!(
                "ℓ = p = {l} is excluded from the truncated Hecke action; use the action at p"
            )));
        }
        let (d0, d1) = self.dims();
        let t_bottom = self.hecke().hecke_matrix(self.weight, l)?;
        let t_top = self.hecke().hecke_matrix(self.top_weight(), l)?;
        let off = if self.is_wedge_split() || d1 == 0 || d0 == 0 {
            Mat::zeros(d0, d1)
        } else {
            self.offdiag_block(l)?
        };
        Ok(assemble_blocks(&t_bottom, &off, &t_top))
    }

    /// The action of `T̃_p`: block diagonal classical `T_p` on both cells
    /// (the attaching map dies after inverting `p`).
    pub fn action_at_p(&self) -> Result<Mat<Rat>> {
        let (d0, d1) = self.dims();
        let t_bottom = self.hecke().hecke_matrix(self.weight, self.p)?;
        let t_top = self.hecke().hecke_matrix(self.top_weight(), self.p)?;
        Ok(assemble_blocks(&t_bottom, &Mat::zeros(d0, d1), &t_top))
    }

    /// The unit-conjugated presentation: off-diagonal coefficient
    /// `−p^{j−1}/n` against the raw commutator, i.e. off-diagonal block
    /// `−(p^{ν_p(n)}/n)·p^j·Δ_n(T_ℓ)` — differs from `action` by the
    /// p-local unit `−p^{ν_p(n)}/n` on the off-diagonal.
    pub fn action_alt(&self, l: u64) -> Result<Mat<Rat>> {
        if !is_prime(l) || l == self.p {
            return Err(Error::invalid(format!("invalid prime ℓ = {l}")));
        }
        let (d0, d1) = self.dims();
        let t_bottom = self.hecke().hecke_matrix(self.weight, l)?;
        let t_top = self.hecke().hecke_matrix(self.top_weight(), l)?;
        let off = if self.is_wedge_split() || d1 == 0 || d0 == 0 {
            Mat::zeros(d0, d1)
        } else {
            let unit = -prime_power_rat(self.p, self.nu()) / rat(self.n as i64);
            self.offdiag_block(l)?.scalar_mul(&unit)
        };
        Ok(assemble_blocks(&t_bottom, &off, &t_top))
    }
}

/// Assemble `[[a, b], [0, d]]` from blocks of shapes `d0×d0`, `d0×d1`,
/// `d1×d1`.
fn assemble_blocks(a: &Mat<Rat>, b: &Mat<Rat>, d: &Mat<Rat>) -> Mat<Rat> {
    let d0 = a.nrows();
    let d1 = d.nrows();
    Mat::from_fn(d0 + d1, d0 + d1, |i, j| {
        if i < d0 && j < d0 {
            a.get(i, j).clone()
        } else if i < d0 {
            b.get(i, j - d0).clone()
        } else if j < d0 {
            Rat::zero()
        } else {
            d.get(i - d0, j - d0).clone()
        }
    })
}

/// A finite wedge of even-dimensional spheres: cell dimensions `d_i`
/// (even, ≥ 0), carrier `⊕_i M_{k − d_i/2}` in degree `2k`, with block
/// diagonal classical Hecke action.
pub struct WedgeModule {
    pub weight: i64,
    pub cell_dims: Vec<u64>,
}

impl WedgeModule {
    pub fn new(weight: i64, cell_dims: Vec<u64>) -> Result<WedgeModule> {
        if cell_dims.iter().any(|d| d % 2 != 0) {
            return Err(Error::invalid("cell dimensions must be even".to_string()));
        }
        if cell_dims.is_empty() {
            return Err(Error::invalid("a wedge needs at least one cell".to_string()));
        }
        Ok(WedgeModule { weight, cell_dims })
    }

    /// The weight carried by each cell: `k − d_i/2`.
    pub fn cell_weights(&self) -> Vec<i64> {
        self.cell_dims
            .iter()
            .map(|d| self.weight - (d / 2) as i64)
            .collect()
    }

    /// Block diagonal classical action of `T_ℓ`.
    pub fn action(&self, hecke: &HeckeContext, l: u64) -> Result<Mat<Rat>> {
        if !is_prime(l) {
            return Err(Error::invalid(format!("{l} is not prime")));
        }
        let blocks: Vec<Mat<Rat>> = self
            .cell_weights()
            .iter()
            .map(|&w| hecke.hecke_matrix(w, l))
            .collect::<Result<_>>()?;
        let total: usize = blocks.iter().map(Mat::nrows).sum();
        let mut m = Mat::zeros(total, total);
        let mut off = 0;
        for b in &blocks {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    m.set(off + i, off + j, b.get(i, j).clone());
                }
            }
            off += b.nrows();
        }
        Ok(m)
    }
}

// ---------------------------------------------------------------------------
// Eigenforms
// ---------------------------------------------------------------------------

/// Where a joint eigenvector is supported.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Support {
    /// `(f, 0)` on a two-cell module.
    BottomOnly,
    /// nonzero top cell on a two-cell module.
    TopNontrivial,
    /// indices of the nonzero cells of a wedge.
    Cells(Vec<usize>),
}

/// A joint eigenform: a simultaneous eigenvector of all tested `T̃_ℓ`,
/// canonically scaled, together with its eigencharacter data.
#[derive(Clone, Debug, PartialEq)]
pub struct TopoEigenform {
    pub support: Support,
    /// natural weight of the character (bottom weight, top weight, or the
    /// cell weight for wedges)
    pub char_weight: i64,
    pub char_kind: CharKind,
    pub disc: Int,
    /// `ℓ ↦ λ(T̃_ℓ)` on the tested primes
    pub lambda: BTreeMap<u64, Quad>,
    /// bottom-cell coordinates (for wedges: concatenated coordinates of
    /// all cells, and `top` is empty)
    pub bottom: Vec<Quad>,
    /// top-cell coordinates (two-cell modules only)
    pub top: Vec<Quad>,
}

impl TopoEigenform {
    /// Deterministic sort key: support, then character data.
    fn sort_key(&self) -> (Support, i64, CharKind, Int, Vec<(Rat, Rat)>) {
        (
            self.support.clone(),
            self.char_weight,
            self.char_kind,
            self.disc.clone(),
            self.lambda
                .values()
                .map(|q| (q.ra().clone(), q.rb().clone()))
                .collect(),
        )
    }
}

/// Joint-eigenform enumeration result; `unresolved_factors` records any
/// characteristic-polynomial factors of degree ≥ 3 whose characters are
/// reported symbolically rather than enumerated.
#[derive(Clone, Debug, PartialEq)]
pub struct JointEigenforms {
    pub eigenforms: Vec<TopoEigenform>,
    pub unresolved_factors: Vec<(i64, Vec<Int>)>,
}

impl JointEigenforms {
    pub fn complete(&self) -> bool {
        self.unresolved_factors.is_empty()
    }
}

/// Canonical scaling of a joint eigenvector, in place: scanning the parts
/// from the **last** (highest cell) backwards, the first nonzero
/// coordinate is made 1 projectively; then the whole vector is multiplied
/// by the p-power making it primitive over `Z_(p)` (minimal coordinate
/// valuation exactly 0).
fn canonicalize_parts(parts: &mut [Vec<Quad>], p: u64) -> Result<()> {
    let lead = parts
        .iter()
        .rev()
        .flat_map(|part| part.iter())
        .find(|x| !x.is_zero())
        .cloned()
        .ok_or_else(|| Error::assertion("cannot canonicalize the zero vector".to_string()))?;
    let inv = lead.inv();
    let mut min_val = Valuation::Infinity;
    for part in parts.iter_mut() {
        for x in part.iter_mut() {
            *x = x.mul_ref(&inv);
            min_val = min_val.min(x.valuation(p));
        }
    }
    let Valuation::Finite(v) = min_val else {
        return Err(Error::assertion("zero vector after scaling".to_string()));
    };
    if v != 0 {
        let scale = prime_power_rat(p, -v);
        for part in parts.iter_mut() {
            for x in part.iter_mut() {
                *x = x.scale(&scale);
            }
        }
    }
    Ok(())
}

/// Dedup candidate characters by their value maps on the tested primes.
fn dedup_characters(mut chars: Vec<Eigencharacter>) -> Vec<Eigencharacter> {
    let mut seen: Vec<BTreeMap<u64, Quad>> = Vec::new();
    chars.retain(|c| {
        if seen.contains(&c.values) {
            false
        } else {
            seen.push(c.values.clone());
            true
        }
    });
    chars
}

/// Kernel of the stacked system `{A_ℓ − λ(ℓ)·I}` over the eigenvalue
/// field.
fn joint_eigenspace(
    actions: &BTreeMap<u64, Mat<Quad>>,
    lambda: &BTreeMap<u64, Quad>,
) -> Vec<Vec<Quad>> {
    let dim = actions.values().next().map_or(0, Mat::nrows);
    let mut stacked: Option<Mat<Quad>> = None;
    for (l, a) in actions {
        let shifted = a.sub(&Mat::<Quad>::identity(dim).scalar_mul(&lambda[l]));
        stacked = Some(match stacked {
            None => shifted,
            Some(s) => s.vstack(&shifted),
        });
    }
    match stacked {
        None => Vec::new(),
        Some(s) => kernel_basis(&s),
    }
}

fn validate_truncation(p: u64, primes: &[u64]) -> Result<()> {
    if primes.is_empty() {
        return Err(Error::invalid("empty truncation set".to_string()));
    }
    for &l in primes {
        if !is_prime(l) {
            return Err(Error::invalid(format!("{l} is not prime")));
        }
        if l == p {
            return Err(Error::invalid(format!(
                "ℓ = p = {l} cannot appear in the truncation set"
            )));
        }
    }
    Ok(())
}

/// All joint eigenforms of the two-cell module under `{T̃_ℓ : ℓ ∈ L}`,
/// found by intersecting exact eigenspaces. Candidate characters are the
/// classical eigencharacters of the two cell weights: a joint eigenvector
/// with nonzero top cell projects to a classical eigenvector of the top
/// weight, and one with zero top cell is classical on the bottom — so the
/// candidate list is exhaustive by the block triangular shape alone,
/// independent of the classification theorem.
pub fn joint_eigenforms(m: &TwoCellModule, primes: &[u64]) -> Result<JointEigenforms> {
    validate_truncation(m.p, primes)?;
    let hecke = m.hecke();
    let (d0, d1) = m.dims();
    let mut actions = BTreeMap::new();
    for &l in primes {
        actions.insert(l, m.action(l)?.to_quad());
    }

    let bottom_chars = eigencharacters(hecke, m.weight, primes)?;
    let top_chars = eigencharacters(hecke, m.top_weight(), primes)?;
    let mut unresolved: Vec<(i64, Vec<Int>)> = Vec::new();
    for f in &bottom_chars.unresolved_factors {
        unresolved.push((m.weight, f.clone()));
    }
    for f in &top_chars.unresolved_factors {
        unresolved.push((m.top_weight(), f.clone()));
    }
    let candidates = dedup_characters(
        bottom_chars
            .characters
            .into_iter()
            .chain(top_chars.characters)
            .collect(),
    );

    let mut eigenforms = Vec::new();
    for ch in candidates {
        let ker = joint_eigenspace(&actions, &ch.values);
        match ker.len() {
            0 => {}
            1 => {
                let v = &ker[0];
                let mut bottom = v[..d0].to_vec();
                let mut top = v[d0..d0 + d1].to_vec();
                {
                    let mut parts = [std::mem::take(&mut bottom), std::mem::take(&mut top)];
                    canonicalize_parts(&mut parts, m.p)?;
                    let [b, t] = parts;
                    bottom = b;
                    top = t;
                }
                let support = if top.iter().all(Quad::is_zero) {
                    Support::BottomOnly
                } else {
                    Support::TopNontrivial
                };
                eigenforms.push(TopoEigenform {
                    support,
                    char_weight: ch.weight,
                    char_kind: ch.kind,
                    disc: ch.disc.clone(),
                    lambda: ch.values.clone(),
                    bottom,
                    top,
                });
            }
            r => {
                return Err(Error::assertion(format!(
                    "joint eigenspace has rank {r} > 1 on a two-cell module \
                     (multiplicity one fails) at character weight {}",
                    ch.weight
                )))
            }
        }
    }
    eigenforms.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(JointEigenforms {
        eigenforms,
        unresolved_factors: unresolved,
    })
}

/// All joint eigenforms of a wedge of spheres (block diagonal classical
/// action); eigenspaces of rank ≥ 2 (repeated cell dimensions) yield one
/// eigenform per basis vector.
pub fn joint_eigenforms_wedge(
    hecke: &HeckeContext,
    w: &WedgeModule,
    primes: &[u64],
) -> Result<JointEigenforms> {
    for &l in primes {
        if !is_prime(l) {
            return Err(Error::invalid(format!("{l} is not prime")));
        }
    }
    let weights = w.cell_weights();
    let cell_dims: Vec<usize> = weights.iter().map(|&k| dim_mk(k)).collect();
    let mut actions = BTreeMap::new();
    for &l in primes {
        actions.insert(l, w.action(hecke, l)?.to_quad());
    }
    let mut unresolved = Vec::new();
    let mut candidates = Vec::new();
    let mut seen_weights = Vec::new();
    for &k in &weights {
        if seen_weights.contains(&k) {
            continue;
        }
        seen_weights.push(k);
        let list = eigencharacters(hecke, k, primes)?;
        for f in &list.unresolved_factors {
            unresolved.push((k, f.clone()));
        }
        candidates.extend(list.characters);
    }
    let candidates = dedup_characters(candidates);

    let mut eigenforms = Vec::new();
    for ch in candidates {
        for v in joint_eigenspace(&actions, &ch.values) {
            // split into per-cell parts, canonicalize, record support
            let mut parts: Vec<Vec<Quad>> = Vec::new();
            let mut off = 0;
            for &d in &cell_dims {
                parts.push(v[off..off + d].to_vec());
                off += d;
            }
            canonicalize_parts(&mut parts, 5)?; // p plays no role for wedges; any odd prime
            let support = Support::Cells(
                parts
                    .iter()
                    .enumerate()
                    .filter(|(_, part)| !part.iter().all(Quad::is_zero))
                    .map(|(i, _)| i)
                    .collect(),
            );
            eigenforms.push(TopoEigenform {
                support,
                char_weight: ch.weight,
                char_kind: ch.kind,
                disc: ch.disc.clone(),
                lambda: ch.values.clone(),
                bottom: parts.concat(),
                top: Vec::new(),
            });
        }
    }
    eigenforms.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(JointEigenforms {
        eigenforms,
        unresolved_factors: unresolved,
    })
}

/// The classification route: write down the eigenforms predicted by the
/// two-type theorem and verify each against the action.
///
/// For `j ≤ ν_p(n)`: `(f, 0)` for every classical eigenform `f ∈ M_k`,
/// and `(−g₀·E^n, p^{1+ν_p(n)−j}·g₀)` for every classical eigenform
/// `g₀ ∈ M_{k−(p−1)n}` (primitive, `a_0`- or `a_1`-normalized). For
/// `j > ν_p(n)` (wedge split): `(f, 0)` and `(0, g₀)`.
pub fn classify_304jf(m: &TwoCellModule, primes: &[u64]) -> Result<JointEigenforms> {
    validate_truncation(m.p, primes)?;
    let hecke = m.hecke();
    let (_, d1) = m.dims();
    let mut eigenforms = Vec::new();
    let mut unresolved = Vec::new();

    let bottom_chars = eigencharacters(hecke, m.weight, primes)?;
    for f in &bottom_chars.unresolved_factors {
        unresolved.push((m.weight, f.clone()));
    }
    for ch in bottom_chars.characters {
        let mut parts = [ch.eigenvector.clone(), vec![Quad::from_i64(0); d1]];
        canonicalize_parts(&mut parts, m.p)?;
        let [bottom, top] = parts;
        eigenforms.push(TopoEigenform {
            support: Support::BottomOnly,
            char_weight: ch.weight,
            char_kind: ch.kind,
            disc: ch.disc.clone(),
            lambda: ch.values.clone(),
            bottom,
            top,
        });
    }

    if d1 > 0 {
        let top_chars = eigencharacters(hecke, m.top_weight(), primes)?;
        for f in &top_chars.unresolved_factors {
            unresolved.push((m.top_weight(), f.clone()));
        }
        let en = m.comm().e_pow_matrix(m.top_weight(), m.n)?.to_quad();
        for ch in top_chars.characters {
            let g0 = &ch.eigenvector;
            let (bottom, top): (Vec<Quad>, Vec<Quad>) = if m.is_wedge_split() {
                (vec![Quad::from_i64(0); dim_mk(m.weight)], g0.clone())
            } else {
                let scale = prime_power_rat(m.p, 1 + m.nu() - m.j as i64);
                (
                    en.apply(g0).iter().map(|x| x.neg_ref()).collect(),
                    g0.iter().map(|x| x.scale(&scale)).collect(),
                )
            };
            let mut parts = [bottom, top];
            canonicalize_parts(&mut parts, m.p)?;
            let [bottom, top] = parts;
            eigenforms.push(TopoEigenform {
                support: Support::TopNontrivial,
                char_weight: ch.weight,
                char_kind: ch.kind,
                disc: ch.disc.clone(),
                lambda: ch.values.clone(),
                bottom,
                top,
            });
        }
    }

    // verify every classified vector really is a joint eigenvector
    for ef in &eigenforms {
        let v: Vec<Quad> = ef.bottom.iter().chain(&ef.top).cloned().collect();
        for &l in primes {
            let a = m.action(l)?.to_quad();
            let av = a.apply(&v);
            let lv: Vec<Quad> = v.iter().map(|x| x.mul_ref(&ef.lambda[&l])).collect();
            if av != lv {
                return Err(Error::assertion(format!(
                    "classified vector fails the eigen equation at ℓ = {l}, \
                     (p, n, j, k) = ({}, {}, {}, {})",
                    m.p, m.n, m.j, m.weight
                )));
            }
        }
    }

    eigenforms.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(JointEigenforms {
        eigenforms,
        unresolved_factors: unresolved,
    })
}

// ---------------------------------------------------------------------------
// Multiplicity one
// ---------------------------------------------------------------------------

/// Eigenspace rank of one candidate character on a module.
#[derive(Clone, Debug)]
pub struct MultiplicityReport {
    pub char_weight: i64,
    pub char_kind: CharKind,
    pub disc: Int,
    pub lambda: BTreeMap<u64, Quad>,
    pub rank: usize,
}

/// Ranks of all candidate joint eigenspaces on a two-cell module,
/// asserting every rank is ≤ 1.
pub fn multiplicity_one_two_cell(
    m: &TwoCellModule,
    primes: &[u64],
) -> Result<Vec<MultiplicityReport>> {
    validate_truncation(m.p, primes)?;
    let mut actions = BTreeMap::new();
    for &l in primes {
        actions.insert(l, m.action(l)?.to_quad());
    }
    let bottom = eigencharacters(m.hecke(), m.weight, primes)?;
    let top = eigencharacters(m.hecke(), m.top_weight(), primes)?;
    let candidates = dedup_characters(
        bottom.characters.into_iter().chain(top.characters).collect(),
    );
    let mut reports = Vec::new();
    for ch in candidates {
        let rank = joint_eigenspace(&actions, &ch.values).len();
        if rank > 1 {
            return Err(Error::assertion(format!(
                "multiplicity one fails on a two-cell module: rank {rank} at \
                 character weight {}, (p, n, j, k) = ({}, {}, {}, {})",
                ch.weight, m.p, m.n, m.j, m.weight
            )));
        }
        reports.push(MultiplicityReport {
            char_weight: ch.weight,
            char_kind: ch.kind,
            disc: ch.disc.clone(),
            lambda: ch.values.clone(),
            rank,
        });
    }
    Ok(reports)
}

/// Ranks of all candidate joint eigenspaces on a wedge (repeated cell
/// dimensions are expected to produce ranks ≥ 2; reported, not asserted).
pub fn multiplicity_one_wedge(
    hecke: &HeckeContext,
    w: &WedgeModule,
    primes: &[u64],
) -> Result<Vec<MultiplicityReport>> {
    let mut actions = BTreeMap::new();
    for &l in primes {
        if !is_prime(l) {
            return Err(Error::invalid(format!("{l} is not prime")));
        }
        actions.insert(l, w.action(hecke, l)?.to_quad());
    }
    let mut candidates = Vec::new();
    let mut seen = Vec::new();
    for k in w.cell_weights() {
        if seen.contains(&k) {
            continue;
        }
        seen.push(k);
        candidates.extend(eigencharacters(hecke, k, primes)?.characters);
    }
    let candidates = dedup_characters(candidates);
    Ok(candidates
        .into_iter()
        .map(|ch| {
            let rank = joint_eigenspace(&actions, &ch.values).len();
            MultiplicityReport {
                char_weight: ch.weight,
                char_kind: ch.kind,
                disc: ch.disc.clone(),
                lambda: ch.values.clone(),
                rank,
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Composite Hecke indices and the unit presentation
// ---------------------------------------------------------------------------

/// Assert the composite-index Hecke relation on certified eigenvectors:
/// `T̃_{ℓ²}v = (λ(ℓ)² − ℓ^{w−1})v` where `T̃_{ℓ²} := T̃_ℓ² − ℓ^{−1}Ψ^ℓ`,
/// with `Ψ^ℓ` the scalar `ℓ^w` at the character's natural weight `w`; for
/// bottom-supported vectors `Ψ^ℓ` is additionally applied as the full
/// block-diagonal grading operator `diag(ℓ^k·I, ℓ^{k−(p−1)n}·I)`, which
/// must agree.
pub fn composite_relation_check(
    m: &TwoCellModule,
    forms: &[TopoEigenform],
    primes: &[u64],
) -> Result<()> {
    let (d0, d1) = m.dims();
    for ef in forms {
        let v: Vec<Quad> = ef.bottom.iter().chain(&ef.top).cloned().collect();
        let w = ef.char_weight;
        for &l in primes {
            let a = m.action(l)?.to_quad();
            let aav = a.apply(&a.apply(&v));
            let lam = &ef.lambda[&l];
            // scalar Ψ^ℓ = ℓ^w at the natural weight
            let corr = prime_power_rat(l, w - 1);
            let expected: Vec<Quad> = v
                .iter()
                .map(|x| x.mul_ref(&lam.mul_ref(lam).sub_ref(&Quad::from_rat(corr.clone()))))
                .collect();
            let got: Vec<Quad> = aav
                .iter()
                .zip(&v)
                .map(|(y, x)| y.sub_ref(&x.scale(&corr)))
                .collect();
            if got != expected {
                return Err(Error::assertion(format!(
                    "composite Hecke relation fails at ℓ = {l} on a certified eigenvector \
                     (character weight {w})"
                )));
            }
            if ef.support == Support::BottomOnly {
                // full block-diagonal Ψ^ℓ on bottom-supported vectors
                let k_top = m.top_weight();
                let psi_v: Vec<Quad> = (0..d0 + d1)
                    .map(|i| {
                        let grade = if i < d0 {
                            prime_power_rat(l, m.weight)
                        } else {
                            prime_power_rat(l, k_top)
                        };
                        v[i].scale(&(grade / rat(l as i64)))
                    })
                    .collect();
                let got_block: Vec<Quad> =
                    aav.iter().zip(&psi_v).map(|(y, x)| y.sub_ref(x)).collect();
                if got_block != expected {
                    return Err(Error::assertion(format!(
                        "blockwise Ψ^ℓ relation fails at ℓ = {l} on a bottom-supported vector"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Assert the unit-presentation invariant: the `−p^{j−1}/n` presentation
/// has the same eigencharacters, and its eigenvectors match after the top
/// cell is rescaled by the reciprocal unit `−p^{ν_p(n)}/n`.
pub fn unit_presentation_check(m: &TwoCellModule, primes: &[u64]) -> Result<()> {
    validate_truncation(m.p, primes)?;
    let std_forms = joint_eigenforms(m, primes)?;
    // joint eigenforms under the alternative action
    let (d0, d1) = m.dims();
    let mut actions = BTreeMap::new();
    for &l in primes {
        actions.insert(l, m.action_alt(l)?.to_quad());
    }
    let bottom = eigencharacters(m.hecke(), m.weight, primes)?;
    let top = eigencharacters(m.hecke(), m.top_weight(), primes)?;
    let candidates = dedup_characters(
        bottom.characters.into_iter().chain(top.characters).collect(),
    );
    let mut alt_forms = Vec::new();
    for ch in candidates {
        let ker = joint_eigenspace(&actions, &ch.values);
        if ker.len() > 1 {
            return Err(Error::assertion(
                "multiplicity one fails for the unit presentation".to_string(),
            ));
        }
        for v in ker {
            // rescale the top cell by the reciprocal unit, then canonicalize:
            // the result must equal the standard-form eigenvector.
            let unit = -prime_power_rat(m.p, m.nu()) / rat(m.n as i64);
            let mut parts = [
                v[..d0].to_vec(),
                v[d0..d0 + d1].iter().map(|x| x.scale(&unit)).collect(),
            ];
            canonicalize_parts(&mut parts, m.p)?;
            let [bottom_v, top_v] = parts;
            alt_forms.push((ch.values.clone(), bottom_v, top_v));
        }
    }
    if alt_forms.len() != std_forms.eigenforms.len() {
        return Err(Error::assertion(format!(
            "unit presentation changes the eigenform count: {} vs {}",
            alt_forms.len(),
            std_forms.eigenforms.len()
        )));
    }
    for (lambda, bottom_v, top_v) in alt_forms {
        let found = std_forms.eigenforms.iter().any(|ef| {
            ef.lambda == lambda && ef.bottom == bottom_v && ef.top == top_v
        });
        if !found {
            return Err(Error::assertion(
                "unit-presentation eigenvector does not match the standard presentation"
                    .to_string(),
            ));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Extension obstruction
// ---------------------------------------------------------------------------

/// Verdict of the extension test for a top-cell eigenform.
#[derive(Clone, Debug)]
pub enum ObstructionVerdict {
    /// `(f_0, g)` is a joint eigenvector for the returned `f_0`.
    Extends { f0: Vec<Quad> },
    /// The obstruction class is nonzero, with the given additive order.
    Obstructed { order: Int },
}

/// Decide whether a classical eigenform `g ∈ M_{k′}` (`k′ = top weight`)
/// extends to a joint eigenform `(f_0, g)` on the two-cell module of
/// `p^j v_1^n α_1` with bottom weight `k = k′ + (p−1)n`: the obstruction
/// is the class of `g ⌣· p^j κ` in the twisted bimodule, computed via
/// `dotcup` and decided by `is_coboundary`; if it vanishes the witness
/// gives `f_0 = −h`, verified against the triangular eigen equations and
/// unique by weight separation.
pub fn extension_obstruction(
    hecke: &HeckeContext,
    p: u64,
    n: u64,
    j: u32,
    k_prime: i64,
    g: &[Quad],
    primes: &[u64],
) -> Result<ObstructionVerdict> {
    validate_truncation(p, primes)?;
    let comm = CommutatorContext::new(hecke, p, n)?;
    let k = k_prime + ((p - 1) * n) as i64;
    if g.len() != dim_mk(k_prime) {
        return Err(Error::invalid(format!(
            "g has {} coordinates, dim M_{k_prime} = {}",
            g.len(),
            dim_mk(k_prime)
        )));
    }
    if g.iter().all(Quad::is_zero) {
        return Ok(ObstructionVerdict::Extends {
            f0: vec![Quad::from_i64(0); dim_mk(k)],
        });
    }
    let kappa = comm.kappa_cocycle(k_prime, primes)?;
    let scaled: HochschildCochain1 = kappa.scale(&prime_power_rat(p, j as i64));
    let cochain: TwistedCochain1 = dotcup(hecke, g, &scaled)?;
    match is_coboundary_twisted(hecke, &cochain, p)? {
        Some(h) => {
            let f0: Vec<Quad> = h.iter().map(|x| x.neg_ref()).collect();
            // verify the eigen equations T_ℓ f_0 + p^j κ(ℓ) g = λ(ℓ) f_0,
            // and uniqueness of f_0 (weight separation: λ is not a
            // character of M_k, so the homogeneous system has kernel 0)
            for &l in primes {
                let t = hecke.hecke_matrix(k, l)?.to_quad();
                let off = scaled.values[&l].to_quad();
                let lam = &cochain.lambda[&l];
                let lhs: Vec<Quad> = t
                    .apply(&f0)
                    .iter()
                    .zip(off.apply(g))
                    .map(|(a, b)| a.add_ref(&b))
                    .collect();
                let rhs: Vec<Quad> = f0.iter().map(|x| x.mul_ref(lam)).collect();
                if lhs != rhs {
                    return Err(Error::assertion(format!(
                        "extension witness fails the eigen equation at ℓ = {l}"
                    )));
                }
            }
            let mut actions = BTreeMap::new();
            for &l in primes {
                actions.insert(l, hecke.hecke_matrix(k, l)?.to_quad());
            }
            if !joint_eigenspace(&actions, &cochain.lambda).is_empty() {
                return Err(Error::assertion(
                    "extension witness is not unique: the top character also occurs on the \
                     bottom weight"
                        .to_string(),
                ));
            }
            Ok(ObstructionVerdict::Extends { f0 })
        }
        None => {
            let nu = int_p_valuation(n, p);
            let cap = (1 + nu + 2) as u32;
            let mut scale = rat(p as i64);
            for s in 1..=cap {
                if is_coboundary_twisted(hecke, &cochain.scale(&scale), p)?.is_some() {
                    return Ok(ObstructionVerdict::Obstructed {
                        order: Int::from(p).pow(s),
                    });
                }
                scale *= rat(p as i64);
            }
            Err(Error::assertion(format!(
                "obstruction order exceeds p^{cap} at (p, n, j, k′) = ({p}, {n}, {j}, {k_prime})"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derived::CommutatorContext;

    fn hctx() -> HeckeContext {
        HeckeContext::with_cache_dir(None)
    }

    fn quads(v: &[i64]) -> Vec<Quad> {
        v.iter().map(|&x| Quad::from_i64(x)).collect()
    }

    #[test]
    fn action_is_upper_triangular_with_classical_blocks() {
        let h = hctx();
        let m = TwoCellModule::new(&h, 5, 1, 0, 16).unwrap();
        assert_eq!(m.top_weight(), 12);
        assert_eq!(m.dims(), (2, 2));
        let a = m.action(2).unwrap();
        assert_eq!(a.nrows(), 4);
        // lower-left block is zero
        for i in 2..4 {
            for jj in 0..2 {
                assert!(a.get(i, jj).is_zero());
            }
        }
        // diagonal blocks are the classical Hecke matrices
        let t16 = h.hecke_matrix(16, 2).unwrap();
        let t12 = h.hecke_matrix(12, 2).unwrap();
        for i in 0..2 {
            for jj in 0..2 {
                assert_eq!(a.get(i, jj), t16.get(i, jj));
                assert_eq!(a.get(2 + i, 2 + jj), t12.get(i, jj));
            }
        }
        // off-diagonal block (j = 0) equals Δ_1(T_2): column for Δ has
        // a_1-entry 48
        assert_eq!(a.get(1, 3), &rat(48));
    }

    #[test]
    fn action_rejects_p_and_composites() {
        let h = hctx();
        let m = TwoCellModule::new(&h, 5, 1, 0, 16).unwrap();
        assert!(m.action(5).is_err());
        assert!(m.action(6).is_err());
    }

    #[test]
    fn action_at_p_is_block_diagonal() {
        let h = hctx();
        let m = TwoCellModule::new(&h, 5, 1, 0, 16).unwrap();
        let a = m.action_at_p().unwrap();
        for i in 0..2 {
            for jj in 2..4 {
                assert!(a.get(i, jj).is_zero(), "off-diagonal must vanish at p");
            }
        }
        // (Δ in the bottom of weight 12? no — bottom is weight 16.)
        // Top cell carries M_12: T_5 Δ = 4830 Δ.
        let v = a.apply(&[rat(0), rat(0), rat(0), rat(1)]);
        assert_eq!(v[3], rat(4830));
    }

    #[test]
    fn wedge_split_action_is_block_diagonal() {
        let h = hctx();
        // j = 1 > ν_5(1) = 0
        let m = TwoCellModule::new(&h, 5, 1, 1, 16).unwrap();
        assert!(m.is_wedge_split());
        let a = m.action(2).unwrap();
        for i in 0..2 {
            for jj in 2..4 {
                assert!(a.get(i, jj).is_zero());
            }
        }
    }

    #[test]
    fn four_eigenforms_at_p5_n1_j0_k16() {
        // The classification at (p, n, j, k) = (5, 1, 0, 16):
        // (E_16, 0), (E_4Δ, 0), (−E_4Δ, 5Δ), (−E_4·E_12, 5·E_12).
        let h = hctx();
        let m = TwoCellModule::new(&h, 5, 1, 0, 16).unwrap();
        let primes = [2u64, 3, 7];
        let joint = joint_eigenforms(&m, &primes).unwrap();
        let classified = classify_304jf(&m, &primes).unwrap();
        assert!(joint.complete() && classified.complete());
        assert_eq!(joint.eigenforms.len(), 4);
        assert_eq!(joint, classified);

        // the cuspidal top-nontrivial one is (−E_4Δ, 5Δ)
        let tau_form = joint
            .eigenforms
            .iter()
            .find(|ef| ef.support == Support::TopNontrivial && ef.char_kind == CharKind::Cuspidal)
            .expect("(−E_4Δ, 5Δ) present");
        assert_eq!(tau_form.char_weight, 12);
        assert_eq!(tau_form.bottom, quads(&[0, -1])); // −E_4Δ
        assert_eq!(tau_form.top, quads(&[0, 5])); // 5Δ
        assert_eq!(tau_form.lambda[&2].as_rat(), Some(&rat(-24)));

        // the bottom-only cusp form is (E_4Δ, 0) with the weight-16
        // cuspidal character
        let bottom_cusp = joint
            .eigenforms
            .iter()
            .find(|ef| ef.support == Support::BottomOnly && ef.char_kind == CharKind::Cuspidal)
            .unwrap();
        assert_eq!(bottom_cusp.char_weight, 16);
        assert_eq!(bottom_cusp.bottom, quads(&[0, 1]));
        assert_eq!(bottom_cusp.lambda[&2].as_rat(), Some(&rat(216)));
    }

    #[test]
    fn wedge_case_eigenforms_split_by_cell() {
        // j = 1 > ν_5(1): the attaching map is null, the complex splits,
        // and there is exactly one eigenform per classical eigenform per
        // cell: (E_16, 0), (E_4Δ, 0), (0, E_12), (0, Δ).
        let h = hctx();
        let m = TwoCellModule::new(&h, 5, 1, 1, 16).unwrap();
        let primes = [2u64, 3, 7];
        let joint = joint_eigenforms(&m, &primes).unwrap();
        let classified = classify_304jf(&m, &primes).unwrap();
        assert_eq!(joint, classified);
        // 2 bottom-supported + 2 top-supported
        assert_eq!(joint.eigenforms.len(), 4);
        assert!(joint
            .eigenforms
            .iter()
            .filter(|e| e.support == Support::BottomOnly)
            .count()
            == 2);
        assert!(joint
            .eigenforms
            .iter()
            .filter(|e| e.support == Support::TopNontrivial)
            .count()
            == 2);
        // top-supported vectors have zero bottom in the wedge case
        for ef in &joint.eigenforms {
            if ef.support == Support::TopNontrivial {
                assert!(ef.bottom.iter().all(Quad::is_zero));
            }
        }
    }

    #[test]
    fn degenerate_top_weight() {
        // p = 7, n = 2, k = 12: top weight 12 − 12 = 0 (constants);
        // p = 7, n = 7, k = 12: top weight negative, dim 0.
        let h = hctx();
        let m = TwoCellModule::new(&h, 7, 2, 0, 12).unwrap();
        assert_eq!(m.top_weight(), 0);
        assert_eq!(m.dims(), (2, 1));
        let joint = joint_eigenforms(&m, &[2, 3, 5]).unwrap();
        let classified = classify_304jf(&m, &[2, 3, 5]).unwrap();
        assert_eq!(joint, classified);
        assert_eq!(joint.eigenforms.len(), 3);

        let m0 = TwoCellModule::new(&h, 7, 7, 0, 12).unwrap();
        assert_eq!(dim_mk(m0.top_weight()), 0);
        let joint0 = joint_eigenforms(&m0, &[2, 3, 5]).unwrap();
        assert_eq!(joint0.eigenforms.len(), 2); // bottom only
        assert!(joint0
            .eigenforms
            .iter()
            .all(|e| e.support == Support::BottomOnly));
    }

    #[test]
    fn single_sphere_recovers_classical_eigenforms() {
        let h = hctx();
        let w = WedgeModule::new(12, vec![0]).unwrap();
        let joint = joint_eigenforms_wedge(&h, &w, &[2, 3, 7]).unwrap();
        assert_eq!(joint.eigenforms.len(), 2);
        for ef in &joint.eigenforms {
            assert_eq!(ef.support, Support::Cells(vec![0]));
        }
        // Δ appears with τ values
        assert!(joint
            .eigenforms
            .iter()
            .any(|e| e.lambda[&2].as_rat() == Some(&rat(-24))));
    }

    #[test]
    fn wedge_of_two_spheres_has_rank_two() {
        let h = hctx();
        let w = WedgeModule::new(12, vec![0, 0]).unwrap();
        let reports = multiplicity_one_wedge(&h, &w, &[2, 3, 7]).unwrap();
        assert_eq!(reports.len(), 2);
        for r in &reports {
            assert_eq!(r.rank, 2, "S⁰ ∨ S⁰ rank at weight 12");
        }
        // and joint_eigenforms reports one form per basis vector
        let joint = joint_eigenforms_wedge(&h, &w, &[2, 3, 7]).unwrap();
        assert_eq!(joint.eigenforms.len(), 4);
    }

    #[test]
    fn wedge_s0_s4_has_rank_at_most_one() {
        let h = hctx();
        let w = WedgeModule::new(12, vec![0, 4]).unwrap();
        // cells carry weights 12 and 10
        assert_eq!(w.cell_weights(), vec![12, 10]);
        let reports = multiplicity_one_wedge(&h, &w, &[2, 3, 7]).unwrap();
        for r in &reports {
            assert!(r.rank <= 1);
        }
    }

    #[test]
    fn multiplicity_one_on_two_cells() {
        let h = hctx();
        for (p, n, j, k) in [(5u64, 1u64, 0u32, 16i64), (5, 5, 1, 12), (7, 2, 0, 24)] {
            let m = TwoCellModule::new(&h, p, n, j, k).unwrap();
            let primes: Vec<u64> = [2u64, 3, 7, 11].into_iter().filter(|&l| l != p).take(3).collect();
            let reports = multiplicity_one_two_cell(&m, &primes).unwrap();
            assert!(reports.iter().all(|r| r.rank <= 1));
            assert!(reports.iter().any(|r| r.rank == 1));
        }
    }

    #[test]
    fn composite_relation_on_certified_eigenvectors() {
        let h = hctx();
        let m = TwoCellModule::new(&h, 5, 1, 0, 16).unwrap();
        let primes = [2u64, 3, 7];
        let joint = joint_eigenforms(&m, &primes).unwrap();
        composite_relation_check(&m, &joint.eigenforms, &primes).unwrap();
    }

    #[test]
    fn unit_presentation_is_equivalent() {
        let h = hctx();
        for (p, n, j, k) in [(5u64, 1u64, 0u32, 16i64), (5, 5, 0, 12), (5, 5, 1, 12)] {
            let m = TwoCellModule::new(&h, p, n, j, k).unwrap();
            unit_presentation_check(&m, &[2, 3, 7]).unwrap();
        }
    }

    #[test]
    fn obstruction_for_delta_at_p5() {
        // g = Δ, (p, n, j) = (5, 1, 0): obstructed of order 5.
        let h = hctx();
        let g = quads(&[0, 1]);
        let verdict = extension_obstruction(&h, 5, 1, 0, 12, &g, &[2, 3, 7]).unwrap();
        match verdict {
            ObstructionVerdict::Obstructed { order } => assert_eq!(order, Int::from(5)),
            ObstructionVerdict::Extends { .. } => panic!("Δ must be obstructed"),
        }
    }

    #[test]
    fn obstruction_for_5delta_extends_with_minus_e4delta() {
        // g = 5Δ extends with f_0 = −E_4Δ.
        let h = hctx();
        let g = quads(&[0, 5]);
        let verdict = extension_obstruction(&h, 5, 1, 0, 12, &g, &[2, 3, 7]).unwrap();
        match verdict {
            ObstructionVerdict::Extends { f0 } => {
                assert_eq!(f0, quads(&[0, -1]), "f_0 = −E_4Δ");
            }
            ObstructionVerdict::Obstructed { .. } => panic!("5Δ must extend"),
        }
    }

    #[test]
    fn obstruction_for_zero_form_extends() {
        let h = hctx();
        let g = quads(&[0, 0]);
        match extension_obstruction(&h, 5, 1, 0, 12, &g, &[2, 3, 7]).unwrap() {
            ObstructionVerdict::Extends { f0 } => {
                assert!(f0.iter().all(Quad::is_zero));
            }
            _ => panic!("0 must extend"),
        }
    }

    #[test]
    fn obstruction_matches_classification_membership() {
        // On the (5, 1, j, 16) modules: the weight-12 characters extend
        // exactly when the scaled form is divisible enough; cross-check
        // verdicts against joint_eigenforms membership.
        let h = hctx();
        for j in [0u32, 1] {
            let m = TwoCellModule::new(&h, 5, 1, j, 16).unwrap();
            let primes = [2u64, 3, 7];
            let joint = joint_eigenforms(&m, &primes).unwrap();
            let top_chars = eigencharacters(&h, 12, &primes).unwrap();
            for ch in &top_chars.characters {
                let g0 = &ch.eigenvector;
                for s in 0..=2u32 {
                    let scale = prime_power_rat(5, s as i64);
                    let g: Vec<Quad> = g0.iter().map(|x| x.scale(&scale)).collect();
                    let verdict =
                        extension_obstruction(&h, 5, 1, j, 12, &g, &primes).unwrap();
                    // membership: the canonical top of the classified form
                    // for this character is p^{1+ν−j}·g0 (or g0 in the
                    // wedge case); g extends iff it is divisible by it.
                    let needed = if (j as i64) > 0 { 0 } else { 1 - j as i64 };
                    let should_extend = (s as i64) >= needed;
                    match (&verdict, should_extend) {
                        (ObstructionVerdict::Extends { .. }, true) => {}
                        (ObstructionVerdict::Obstructed { order }, false) => {
                            assert_eq!(
                                *order,
                                Int::from(5).pow((needed - s as i64) as u32),
                                "order at j = {j}, s = {s}"
                            );
                        }
                        _ => panic!("verdict mismatch at j = {j}, s = {s}"),
                    }
                }
            }
            // membership direction: every classified top-nontrivial form's
            // top component extends with the classified bottom
            for ef in joint.eigenforms.iter().filter(|e| e.support == Support::TopNontrivial) {
                let verdict =
                    extension_obstruction(&h, 5, 1, j, 12, &ef.top, &primes).unwrap();
                match verdict {
                    ObstructionVerdict::Extends { f0 } => {
                        if !m.is_wedge_split() {
                            assert_eq!(f0, ef.bottom, "witness matches the classified bottom");
                        }
                    }
                    ObstructionVerdict::Obstructed { .. } => {
                        panic!("classified top must extend")
                    }
                }
            }
        }
    }

    #[test]
    fn offdiag_shares_the_kappa_code_path() {
        let h = hctx();
        let m = TwoCellModule::new(&h, 5, 2, 1, 20).unwrap();
        let comm = CommutatorContext::new(&h, 5, 2).unwrap();
        let kappa = comm.kappa_cocycle(12, &[3]).unwrap();
        let expected = kappa.values[&3].scalar_mul(&rat(5)); // p^j, j = 1
        assert_eq!(m.offdiag_block(3).unwrap(), expected);
    }
}
