//! The acceptance grid: twelve numbered end-to-end checks pinning the
//! crate's expected values, each reported as one pass/fail line.
//!
//! The same engine backs the `acceptance` integration-test target and the
//! CLI `selftest` subcommand, so there is exactly one source of truth for
//! the grids, truncation sets, and expected orders. Every comparison is
//! exact (no tolerances); a criterion fails on any deviation and carries
//! the failing assertion in its `detail` line.

use num::One;

use crate::arith::{
    alt_binom_sum, bernoulli, int_p_valuation, p_valuation, rat, Int, Valuation,
};
use crate::cobar::{alpha_cocycle, cobar_d, ext1_order, twisted_zeta_check, ZetaVerdict};
use crate::derived::{dotcup, is_coboundary_twisted, CommutatorContext};
use crate::linalg::Quad;
use crate::modforms::{dim_mk, eigencharacters, prime_power_rat, CharKind, HeckeContext};
use crate::qseries::{delta_series, eisenstein};
use crate::topo::{
    classify_304jf, extension_obstruction, joint_eigenforms, multiplicity_one_two_cell,
    multiplicity_one_wedge, ObstructionVerdict, Support, TwoCellModule, WedgeModule,
};
use crate::{Error, Result};

/// Even weights `12 ≤ k ≤ 28`: the Hecke-relation sweep and the bottom
/// weights of the classification grid.
const WEIGHTS: [i64; 9] = [12, 14, 16, 18, 20, 22, 24, 26, 28];
/// Primes for the Hecke-relation sweep.
const RELATION_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];
/// Primes of the Eisenstein congruence `E_{p−1} ≡ 1 (mod p)`.
const CONGRUENCE_PRIMES: [u64; 4] = [5, 7, 11, 13];
/// Coefficient precision of the congruence check.
const CONGRUENCE_PREC: usize = 60;
/// `n` values of the class-order grid (criterion 6) and of the shared
/// class-order/Ext¹ comparison (criterion 11).
const CLASS_ORDER_NS: [u64; 5] = [1, 2, 5, 7, 10];

/// One row of the acceptance report.
#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub number: u32,
    pub name: &'static str,
    pub passed: bool,
    /// What was checked (on success) or the failing assertion (on failure).
    pub detail: String,
}

struct Env<'a> {
    hecke: &'a HeckeContext,
    /// Negative control: deliberately corrupt one class-order expectation so
    /// the run must fail with a named assertion.
    tamper: bool,
}

/// Run the twelve acceptance criteria in order. With `tamper` set, one
/// expected value in criterion 6 is deliberately corrupted; a healthy build
/// then reports exactly that criterion as failed.
pub fn run_all(hecke: &HeckeContext, tamper: bool) -> Vec<CriterionResult> {
    let env = Env { hecke, tamper };
    let table: [(&'static str, fn(&Env) -> Result<String>); 12] = [
        ("hecke-relations", c01_hecke_relations),
        ("eisenstein-congruences", c02_eisenstein_congruences),
        ("alternating-binomials", c03_alternating_binomials),
        ("commutator-dual-route", c04_commutator_dual_route),
        ("commutator-integrality", c05_commutator_integrality),
        ("kappa-class-order", c06_kappa_class_order),
        ("dotcup-nonvanishing", c07_dotcup_nonvanishing),
        ("two-cell-classification", c08_two_cell_classification),
        ("multiplicity-one", c09_multiplicity_one),
        ("extension-obstruction", c10_extension_obstruction),
        ("ext-one-orders", c11_ext_one_orders),
        ("twisted-zeta", c12_twisted_zeta),
    ];
    table
        .iter()
        .enumerate()
        .map(|(i, (name, run))| match run(&env) {
            Ok(detail) => CriterionResult {
                number: (i + 1) as u32,
                name,
                passed: true,
                detail,
            },
            Err(e) => CriterionResult {
                number: (i + 1) as u32,
                name,
                passed: false,
                detail: e.to_string(),
            },
        })
        .collect()
}

pub fn all_passed(results: &[CriterionResult]) -> bool {
    results.iter().all(|r| r.passed)
}

// ---------------------------------------------------------------------------
// The criteria
// ---------------------------------------------------------------------------

/// 1. `T_{ℓm} = T_ℓ T_m` for coprime `ℓ, m` and
///    `T_{ℓ³} = T_ℓ T_{ℓ²} − ℓ^{k−1} T_ℓ`, with every composite index also
///    recomputed from the closed divisor-sum formula so the check does not
///    collapse into the recursion that defines it.
fn c01_hecke_relations(env: &Env) -> Result<String> {
    let hecke = env.hecke;
    let mut pair_checks = 0usize;
    let mut power_checks = 0usize;
    for &k in &WEIGHTS {
        let d = dim_mk(k);
        // one basis computation per weight, at the largest precision the
        // divisor-sum route requests below (index 13³)
        hecke.basis(k, 13 * 13 * 13 * d + 1)?;
        for (idx, &l) in RELATION_PRIMES.iter().enumerate() {
            let tl = hecke.hecke_matrix(k, l)?;
            for &m in &RELATION_PRIMES[idx + 1..] {
                let tm = hecke.hecke_matrix(k, m)?;
                let product = tl.mul(&tm);
                if product != tm.mul(&tl) {
                    return Err(Error::assertion(format!(
                        "T_{l} and T_{m} do not commute on M_{k}"
                    )));
                }
                let lm = l * m;
                if product != hecke.hecke_matrix_direct(k, lm)?
                    || product != hecke.hecke_matrix(k, lm)?
                {
                    return Err(Error::assertion(format!(
                        "T_{lm} ≠ T_{l}·T_{m} on M_{k} against the divisor-sum route"
                    )));
                }
                pair_checks += 1;
            }
            let t_sq = hecke.hecke_matrix(k, l * l)?;
            if t_sq != hecke.hecke_matrix_direct(k, l * l)? {
                return Err(Error::assertion(format!(
                    "T_{{{l}²}} recursion ≠ divisor-sum route on M_{k}"
                )));
            }
            let cube = hecke.hecke_matrix_direct(k, l * l * l)?;
            let rhs = tl.mul(&t_sq).sub(&tl.scalar_mul(&prime_power_rat(l, k - 1)));
            if cube != rhs {
                return Err(Error::assertion(format!(
                    "T_{{{l}³}} ≠ T_{l}·T_{{{l}²}} − {l}^{{k−1}}·T_{l} on M_{k}"
                )));
            }
            power_checks += 1;
        }
    }
    Ok(format!(
        "{pair_checks} coprime-product and {power_checks} prime-power identities hold \
         exactly against the divisor-sum route (weights 12–28, primes ≤ 13)"
    ))
}

/// 2. `E_{p−1} ≡ 1 (mod p)` coefficientwise to 60 terms, and
///    `ν_p(B_{p−1}) = −1`, for `p ∈ {5, 7, 11, 13}`.
fn c02_eisenstein_congruences(_env: &Env) -> Result<String> {
    for &p in &CONGRUENCE_PRIMES {
        let e = eisenstein(p as i64 - 1, CONGRUENCE_PREC)?;
        if !e.coeff(0).is_one() {
            return Err(Error::assertion(format!("a_0(E_{{{}}}) ≠ 1", p - 1)));
        }
        for i in 1..CONGRUENCE_PREC {
            if p_valuation(e.coeff(i), p) < Valuation::Finite(1) {
                return Err(Error::assertion(format!(
                    "a_{i}(E_{{{}}}) ≢ 0 (mod {p})",
                    p - 1
                )));
            }
        }
        if p_valuation(&bernoulli(p - 1), p) != Valuation::Finite(-1) {
            return Err(Error::assertion(format!("ν_{p}(B_{{{}}}) ≠ −1", p - 1)));
        }
    }
    Ok(format!(
        "E_{{p−1}} ≡ 1 (mod p) to {CONGRUENCE_PREC} coefficients and ν_p(B_{{p−1}}) = −1 \
         for p ∈ {{5, 7, 11, 13}}"
    ))
}

/// 3. The alternating binomial sums collapse to the Kronecker delta:
///    `alt_binom_sum(n, k) = [k = n]` for all `0 ≤ k ≤ n ≤ 15`.
fn c03_alternating_binomials(_env: &Env) -> Result<String> {
    let mut checks = 0usize;
    for n in 0..=15u64 {
        for k in 0..=n {
            let expected = if k == n { Int::one() } else { Int::from(0) };
            if alt_binom_sum(n, k) != expected {
                return Err(Error::assertion(format!(
                    "alt_binom_sum({n}, {k}) ≠ [k = n]"
                )));
            }
            checks += 1;
        }
    }
    Ok(format!(
        "{checks} alternating binomial sums collapse to δ_{{k,n}} (0 ≤ k ≤ n ≤ 15)"
    ))
}

/// 4. The defining sum for `D_n` equals `(T∘e^n − e^n∘T)/μ` as an exact
///    matrix identity for `p ∈ {5, 7}`, `n ≤ 6`, `ℓ ∈ {2, 3}`,
///    `k ∈ {12, 16}`. Both routes are computed inside `apply_dn`, which
///    errors on any disagreement.
fn c04_commutator_dual_route(env: &Env) -> Result<String> {
    let mut checks = 0usize;
    for &p in &[5u64, 7] {
        for n in 1..=6u64 {
            let comm = CommutatorContext::new(env.hecke, p, n)?;
            for &l in &[2u64, 3] {
                let op = comm.hecke_op(l);
                for &k in &[12i64, 16] {
                    comm.apply_dn(&op, k)?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!(
        "{checks} commutator matrices: defining sum = (T∘e^n − e^n∘T)/μ exactly \
         (p ∈ {{5, 7}}, n ≤ 6, ℓ ∈ {{2, 3}}, k ∈ {{12, 16}})"
    ))
}

/// 5. Every entry of `D_n(T_ℓ)` is divisible by `p^{ν_p(n)}` for `p = 5`,
///    `n ∈ {5, 10, 25}`, `ℓ ∈ {2, 3}` at weight 12.
fn c05_commutator_integrality(env: &Env) -> Result<String> {
    let p = 5u64;
    let mut checks = 0usize;
    for &n in &[5u64, 10, 25] {
        let comm = CommutatorContext::new(env.hecke, p, n)?;
        let nu = comm.nu();
        for &l in &[2u64, 3] {
            let dn = comm.apply_dn(&comm.hecke_op(l), 12)?;
            for i in 0..dn.nrows() {
                for jj in 0..dn.ncols() {
                    if p_valuation(dn.get(i, jj), p) < Valuation::Finite(nu) {
                        return Err(Error::assertion(format!(
                            "5^{nu} ∤ D_{n}(T_{l}) entry ({i}, {jj}) at weight 12"
                        )));
                    }
                }
            }
            checks += 1;
        }
    }
    Ok(format!(
        "all entries of D_n(T_ℓ) divisible by 5^{{ν_5(n)}} for n ∈ {{5, 10, 25}}, \
         ℓ ∈ {{2, 3}} at weight 12 ({checks} matrices)"
    ))
}

/// 6. `class_order(κ_n) = p^{1+ν_p(n)}` at weight 12 for `p ∈ {5, 7}` and
///    `n ∈ {1, 2, 5, 7, 10}`, truncation `{2, 3, 7, 11, 13} \ {p}`; the
///    upper bound is witnessed by the explicit coboundary of `e^n`:
///    `T∘e^n − e^n∘T = p^{1+ν}·κ`.
fn c06_kappa_class_order(env: &Env) -> Result<String> {
    let mut orders = Vec::new();
    for &p in &[5u64, 7] {
        let trunc: Vec<u64> = [2u64, 3, 7, 11, 13]
            .into_iter()
            .filter(|&l| l != p)
            .collect();
        for &n in &CLASS_ORDER_NS {
            let comm = CommutatorContext::new(env.hecke, p, n)?;
            let nu = comm.nu() as u32;
            let mut expected = Int::from(p).pow(1 + nu);
            if env.tamper && p == 5 && n == 1 {
                expected *= Int::from(p);
            }
            let order = comm.class_order(12, &trunc)?;
            if order != expected {
                return Err(Error::assertion(format!(
                    "class_order(p = {p}, n = {n}, k = 12) = {order}, expected {expected}"
                )));
            }
            let kappa = comm.kappa_cocycle(12, &trunc)?;
            let en = comm.e_pow_matrix(12, n)?;
            let scale = prime_power_rat(p, 1 + nu as i64);
            let k_to = 12 + ((p - 1) * n) as i64;
            for (&l, kval) in &kappa.values {
                let lhs = env
                    .hecke
                    .hecke_matrix(k_to, l)?
                    .mul(&en)
                    .sub(&en.mul(&env.hecke.hecke_matrix(12, l)?));
                if lhs != kval.scalar_mul(&scale) {
                    return Err(Error::assertion(format!(
                        "e^{n} is not an explicit coboundary witness for p^{{1+ν}}·κ \
                         at (p, ℓ) = ({p}, {l})"
                    )));
                }
            }
            orders.push(format!("{order}"));
        }
    }
    Ok(format!(
        "class orders at weight 12 are {} for (p, n) on {{5, 7}} × {{1, 2, 5, 7, 10}}, \
         each witnessed by the coboundary of e^n",
        orders.join(", ")
    ))
}

/// 7. The weight-16 example at `p = 5`: `(T_ℓ(ΔE_4) − τ(ℓ)·ΔE_4)/5` is
///    5-integral (ΔE_4 is an eigenform mod 5), `5·(Δ ⌣· κ)` is principal
///    with the forced witness `ΔE_4`, and `Δ ⌣· κ` itself is not a
///    coboundary — at truncation `{2, 3, 7}` and again at
///    `{2, 3, 7, 11, 13}`.
fn c07_dotcup_nonvanishing(env: &Env) -> Result<String> {
    let hecke = env.hecke;
    let p = 5u64;
    let base: [u64; 3] = [2, 3, 7];
    let extended: [u64; 5] = [2, 3, 7, 11, 13];

    let d12 = dim_mk(12);
    let d16 = dim_mk(16);
    let delta = delta_series(d12.max(d16) + 1);
    let delta_coords = hecke.coords_of_series(12, &delta.truncate(d12 + 1))?;
    let de4 = delta.mul(&eisenstein(4, d16 + 1)?);
    let de4_coords = hecke.coords_of_series(16, &de4)?;

    let tau = eigencharacters(hecke, 12, &extended)?
        .characters
        .into_iter()
        .find(|c| c.kind == CharKind::Cuspidal)
        .ok_or_else(|| Error::assertion("no cusp character at weight 12".to_string()))?;

    for &l in &base {
        let tv = hecke.hecke_matrix(16, l)?.apply(&de4_coords);
        let tau_l = tau.values[&l]
            .as_rat()
            .expect("weight-12 cusp eigenvalues are rational")
            .clone();
        for (i, (a, b)) in tv.iter().zip(&de4_coords).enumerate() {
            let f = (a - &(tau_l.clone() * b)) / rat(5);
            if p_valuation(&f, p) < Valuation::Finite(0) {
                return Err(Error::assertion(format!(
                    "(T_{l}(ΔE_4) − τ({l})·ΔE_4)/5 has a non-5-integral coordinate ({i})"
                )));
            }
        }
    }

    let comm = CommutatorContext::new(hecke, p, 1)?;
    let fq: Vec<Quad> = delta_coords.iter().cloned().map(Quad::from_rat).collect();
    let expected_witness: Vec<Quad> = de4_coords.iter().cloned().map(Quad::from_rat).collect();
    for trunc in [&base[..], &extended[..]] {
        let kappa = comm.kappa_cocycle(12, trunc)?;
        let cup = dotcup(hecke, &fq, &kappa)?;
        match is_coboundary_twisted(hecke, &cup.scale(&rat(5)), p)? {
            Some(h) => {
                if h != expected_witness {
                    return Err(Error::assertion(format!(
                        "witness of 5·(Δ ⌣· κ) differs from ΔE_4 at truncation {trunc:?}"
                    )));
                }
            }
            None => {
                return Err(Error::assertion(format!(
                    "5·(Δ ⌣· κ) is not principal at truncation {trunc:?}"
                )));
            }
        }
        if is_coboundary_twisted(hecke, &cup, p)?.is_some() {
            return Err(Error::assertion(format!(
                "Δ ⌣· κ is already a coboundary at truncation {trunc:?}"
            )));
        }
    }
    Ok(
        "ΔE_4 is an eigenform mod 5 with 5-integral (T_ℓ − τ(ℓ))/5 images; 5·(Δ ⌣· κ) \
         is principal with witness ΔE_4; Δ ⌣· κ is not a coboundary (truncations \
         {2,3,7} and {2,3,7,11,13})"
            .to_string(),
    )
}

/// 8. Brute-force joint eigenforms equal the classified list — exact list
///    equality after canonical scaling — on the grid `p ∈ {5, 7}`,
///    `n ∈ {1, 2, p}`, `0 ≤ j ≤ ν_p(n)+1`, `k ∈ {12, …, 28}`, with the
///    first three primes ≠ p as truncation.
fn c08_two_cell_classification(env: &Env) -> Result<String> {
    let mut points = 0usize;
    let mut forms = 0usize;
    for &p in &[5u64, 7] {
        let trunc = truncation_for(p);
        for (n, j) in grid_points(p) {
            for &k in &WEIGHTS {
                let m = TwoCellModule::new(env.hecke, p, n, j, k)?;
                let joint = joint_eigenforms(&m, &trunc)?;
                let classified = classify_304jf(&m, &trunc)?;
                if !joint.complete() || !classified.complete() {
                    return Err(Error::assertion(format!(
                        "unresolved eigencharacter factors at (p, n, j, k) = ({p}, {n}, {j}, {k})"
                    )));
                }
                if joint != classified {
                    return Err(Error::assertion(format!(
                        "joint eigenforms differ from the classification at \
                         (p, n, j, k) = ({p}, {n}, {j}, {k})"
                    )));
                }
                points += 1;
                forms += joint.eigenforms.len();
            }
        }
    }
    Ok(format!(
        "{points} modules: brute-force joint eigenforms equal the classified list \
         ({forms} eigenforms, exact equality after canonical scaling)"
    ))
}

/// 9. Multiplicity one: every candidate eigencharacter has joint eigenspace
///    rank ≤ 1 on every module of the classification grid, while `S⁰ ∨ S⁰`
///    at weight 12 reproduces rank 2.
fn c09_multiplicity_one(env: &Env) -> Result<String> {
    let mut reports = 0usize;
    for &p in &[5u64, 7] {
        let trunc = truncation_for(p);
        for (n, j) in grid_points(p) {
            for &k in &WEIGHTS {
                let m = TwoCellModule::new(env.hecke, p, n, j, k)?;
                reports += multiplicity_one_two_cell(&m, &trunc)?.len();
            }
        }
    }
    let wedge = WedgeModule::new(12, vec![0, 0])?;
    let wedge_reports = multiplicity_one_wedge(env.hecke, &wedge, &[2, 3, 7])?;
    if wedge_reports.is_empty() || !wedge_reports.iter().all(|r| r.rank == 2) {
        return Err(Error::assertion(
            "expected every weight-12 eigencharacter to have rank 2 on S⁰ ∨ S⁰".to_string(),
        ));
    }
    Ok(format!(
        "{reports} joint eigenspaces on the classification grid have rank ≤ 1; \
         S⁰ ∨ S⁰ at weight 12 reproduces rank 2"
    ))
}

/// 10. Extension obstructions: on every grid point of criterion 8 and for
///     every top-cell eigencharacter `g₀`, the verdict for `p^s·g₀` is
///     `Extends` exactly when `p^s·g₀` is a `Z_(p)`-multiple of the top
///     cell of the corresponding joint eigenform (membership exponent read
///     off the canonical form, not the order formula), with obstruction
///     order `p^{t−s}` below the threshold and the canonical bottom cell
///     as the witness at it.
fn c10_extension_obstruction(env: &Env) -> Result<String> {
    let hecke = env.hecke;
    let mut verdicts = 0usize;
    for &p in &[5u64, 7] {
        let trunc = truncation_for(p);
        for (n, j) in grid_points(p) {
            for &k in &WEIGHTS {
                let m = TwoCellModule::new(hecke, p, n, j, k)?;
                let k_top = m.top_weight();
                if dim_mk(k_top) == 0 {
                    continue;
                }
                let joint = joint_eigenforms(&m, &trunc)?;
                for ch in eigencharacters(hecke, k_top, &trunc)?.characters {
                    let form = joint
                        .eigenforms
                        .iter()
                        .find(|ef| ef.support == Support::TopNontrivial && ef.lambda == ch.values)
                        .ok_or_else(|| {
                            Error::assertion(format!(
                                "missing top-supported eigenform for a weight-{k_top} character \
                                 at (p, n, j, k) = ({p}, {n}, {j}, {k})"
                            ))
                        })?;
                    let t = min_valuation(&form.top, p)? - min_valuation(&ch.eigenvector, p)?;
                    if t < 0 {
                        return Err(Error::assertion(format!(
                            "canonical top cell is not a p-multiple of the primitive eigenvector \
                             at (p, n, j, k) = ({p}, {n}, {j}, {k})"
                        )));
                    }
                    for s in 0..=t + 1 {
                        let scale = prime_power_rat(p, s);
                        let g: Vec<Quad> =
                            ch.eigenvector.iter().map(|x| x.scale(&scale)).collect();
                        let verdict = extension_obstruction(hecke, p, n, j, k_top, &g, &trunc)?;
                        let ok = match &verdict {
                            ObstructionVerdict::Extends { .. } => s >= t,
                            ObstructionVerdict::Obstructed { order } => {
                                s < t && *order == Int::from(p).pow((t - s) as u32)
                            }
                        };
                        if !ok {
                            return Err(Error::assertion(format!(
                                "obstruction verdict {verdict:?} at p^{s}·g₀ disagrees with the \
                                 membership exponent {t} at (p, n, j, k) = ({p}, {n}, {j}, {k})"
                            )));
                        }
                        verdicts += 1;
                    }
                    if !m.is_wedge_split() {
                        match extension_obstruction(hecke, p, n, j, k_top, &form.top, &trunc)? {
                            ObstructionVerdict::Extends { f0 } if f0 == form.bottom => {}
                            _ => {
                                return Err(Error::assertion(format!(
                                    "extension witness does not reproduce the canonical bottom \
                                     cell at (p, n, j, k) = ({p}, {n}, {j}, {k})"
                                )));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{verdicts} obstruction verdicts agree with joint-eigenform membership and \
         carry the dot-cup class order below the threshold"
    ))
}

/// 11. `σ_n` is a cobar cocycle with `Ext¹` order `p^{1+ν_p(n)}` for
///     `p ∈ {5, 7}`, `n ≤ 10`; on `n ∈ {1, 2, 5, 7, 10}` the order equals
///     the weight-12 Hochschild class order.
fn c11_ext_one_orders(env: &Env) -> Result<String> {
    let mut checks = 0usize;
    for &p in &[5u64, 7] {
        for n in 1..=10u64 {
            let sigma = alpha_cocycle(p, n)?;
            if !cobar_d(p, &sigma)?.is_zero() {
                return Err(Error::assertion(format!("d¹(σ_{n}) ≠ 0 at p = {p}")));
            }
            let expected = Int::from(p).pow(1 + int_p_valuation(n, p) as u32);
            let order = ext1_order(p, n)?;
            if order != expected {
                return Err(Error::assertion(format!(
                    "ext1_order({p}, {n}) = {order}, expected {expected}"
                )));
            }
            checks += 1;
        }
        let trunc: Vec<u64> = [2u64, 3, 7, 11, 13]
            .into_iter()
            .filter(|&l| l != p)
            .collect();
        for &n in &CLASS_ORDER_NS {
            let comm = CommutatorContext::new(env.hecke, p, n)?;
            if ext1_order(p, n)? != comm.class_order(12, &trunc)? {
                return Err(Error::assertion(format!(
                    "ext1_order({p}, {n}) differs from the weight-12 class order"
                )));
            }
        }
    }
    Ok(format!(
        "σ_n is a cocycle with Ext¹ order p^{{1+ν_p(n)}} for p ∈ {{5, 7}}, n ≤ 10 \
         ({checks} pairs); orders equal the weight-12 class orders on the shared grid"
    ))
}

/// 12. The twisted-complex forcing: `ζ(1) = p^j·σ_n` (uniquely) at
///     `(p, n, j) ∈ {(5,1,0), (5,5,0), (5,5,1), (7,1,0)}` and `ζ(1) = 0`
///     at `j = ν_p(n) + 1`.
fn c12_twisted_zeta(_env: &Env) -> Result<String> {
    let forced: [(u64, u64, u32); 4] = [(5, 1, 0), (5, 5, 0), (5, 5, 1), (7, 1, 0)];
    for &(p, n, j) in &forced {
        match twisted_zeta_check(p, n, j)? {
            ZetaVerdict::SigmaMultiple { exponent } if exponent == j => {}
            other => {
                return Err(Error::assertion(format!(
                    "ζ(1) at (p, n, j) = ({p}, {n}, {j}) is {other:?}, expected p^{j}·σ_{n}"
                )));
            }
        }
    }
    for &(p, n) in &[(5u64, 1u64), (5, 5), (7, 1)] {
        let j = int_p_valuation(n, p) as u32 + 1;
        match twisted_zeta_check(p, n, j)? {
            ZetaVerdict::Zero => {}
            other => {
                return Err(Error::assertion(format!(
                    "ζ(1) at (p, n, j) = ({p}, {n}, {j}) is {other:?}, expected 0"
                )));
            }
        }
    }
    Ok(
        "ζ(1) is forced to p^j·σ_n on {(5,1,0), (5,5,0), (5,5,1), (7,1,0)} and to 0 \
         at j = ν_p(n) + 1"
            .to_string(),
    )
}

// ---------------------------------------------------------------------------
// Grid helpers
// ---------------------------------------------------------------------------

/// `(n, j)` pairs of the classification grid at `p`: `n ∈ {1, 2, p}` and
/// `0 ≤ j ≤ ν_p(n) + 1`.
fn grid_points(p: u64) -> Vec<(u64, u32)> {
    let mut pts = Vec::new();
    for n in [1, 2, p] {
        let nu = int_p_valuation(n, p) as u32;
        for j in 0..=nu + 1 {
            pts.push((n, j));
        }
    }
    pts
}

/// The first three primes different from `p`.
fn truncation_for(p: u64) -> Vec<u64> {
    [2u64, 3, 5, 7, 11]
        .into_iter()
        .filter(|&l| l != p)
        .take(3)
        .collect()
}

/// Minimal p-adic valuation over the coordinates of a nonzero vector.
fn min_valuation(v: &[Quad], p: u64) -> Result<i64> {
    let mut best: Option<i64> = None;
    for x in v {
        if let Valuation::Finite(e) = x.valuation(p) {
            best = Some(best.map_or(e, |b| b.min(e)));
        }
    }
    best.ok_or_else(|| Error::assertion("valuation of the zero vector".to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hctx() -> HeckeContext {
        HeckeContext::with_cache_dir(None)
    }

    #[test]
    fn alternating_binomials_pass() {
        let h = hctx();
        let env = Env {
            hecke: &h,
            tamper: false,
        };
        assert!(c03_alternating_binomials(&env).is_ok());
    }

    #[test]
    fn eisenstein_congruences_pass() {
        let h = hctx();
        let env = Env {
            hecke: &h,
            tamper: false,
        };
        assert!(c02_eisenstein_congruences(&env).is_ok());
    }

    #[test]
    fn twisted_zeta_criterion_passes() {
        let h = hctx();
        let env = Env {
            hecke: &h,
            tamper: false,
        };
        assert!(c12_twisted_zeta(&env).is_ok());
    }

    #[test]
    fn tampering_breaks_the_class_order_check_by_name() {
        let h = hctx();
        let env = Env {
            hecke: &h,
            tamper: true,
        };
        let err = c06_kappa_class_order(&env).unwrap_err().to_string();
        assert!(
            err.contains("class_order(p = 5, n = 1, k = 12)"),
            "unexpected message: {err}"
        );
        assert!(err.contains("expected 25"), "unexpected message: {err}");
    }

    #[test]
    fn grid_shape_matches_the_announced_counts() {
        // p = 5: n ∈ {1, 2, 5} contribute 2 + 2 + 3 j-values
        assert_eq!(grid_points(5).len(), 7);
        assert_eq!(grid_points(7).len(), 7);
        assert_eq!(truncation_for(5), vec![2, 3, 7]);
        assert_eq!(truncation_for(7), vec![2, 3, 5]);
    }
}
