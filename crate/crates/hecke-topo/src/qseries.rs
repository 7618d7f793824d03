//! Truncated q-expansions with exact rational coefficients.
//!
//! A [`QSeries`] stores the coefficients `a_0, …, a_{N−1}` of
//! `f = Σ a_n q^n` together with an advisory weight tag. Arithmetic between
//! series of different precision silently truncates to the minimum, which is
//! how precision bounds propagate through Hecke operators; weight tags add
//! under multiplication when both operands carry one.
//!
//! The Cauchy product is the hot loop of the whole crate. Products of
//! integer series (the only kind that occurs at high precision: Eisenstein
//! series, Δ, and the Miller basis all have integer coefficients) run
//! through a dedicated `BigInt` convolution with a Karatsuba split above
//! [`KARATSUBA_THRESHOLD`]; everything else uses the naive truncated
//! product.

use num::{BigInt, One, Zero};
use serde_json::{json, Value};

use crate::arith::{bernoulli, rat, Rat};
use crate::error::Error;
use crate::Result;

type Int = BigInt;

/// Length above which integer convolutions switch from the schoolbook
/// product to Karatsuba.
const KARATSUBA_THRESHOLD: usize = 64;

/// A truncated q-expansion `Σ_{n<prec} a_n q^n` with exact rational
/// coefficients and an optional (advisory) weight tag.
#[derive(Clone, PartialEq, Debug)]
pub struct QSeries {
    coeffs: Vec<Rat>,
    weight: Option<i64>,
}

impl QSeries {
    /// Build from explicit coefficients (`prec` = their number).
    pub fn new(coeffs: Vec<Rat>, weight: Option<i64>) -> QSeries {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        QSeries { coeffs, weight }
    }

    /// The zero series at the given precision (no weight tag).
    pub fn zero(prec: usize) -> QSeries {
        QSeries::new(vec![Rat::zero(); prec.max(1)], None)
    }

    /// The constant series 1 at the given precision, weight tag 0.
    pub fn one(prec: usize) -> QSeries {
        let mut c = vec![Rat::zero(); prec.max(1)];
        c[0] = Rat::one();
        QSeries::new(c, Some(0))
    }

    /// Build from a coefficient function.
    pub fn from_fn(prec: usize, mut f: impl FnMut(usize) -> Rat, weight: Option<i64>) -> QSeries {
        QSeries::new((0..prec.max(1)).map(|n| f(n)).collect(), weight)
    }

    /// Number of stored coefficients.
    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `q^n` (must be within precision).
    pub fn coeff(&self, n: usize) -> &Rat {
        &self.coeffs[n]
    }

    /// All stored coefficients.
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// The advisory weight tag.
    pub fn weight(&self) -> Option<i64> {
        self.weight
    }

    /// Same series with a replaced weight tag.
    pub fn with_weight(mut self, weight: Option<i64>) -> QSeries {
        self.weight = weight;
        self
    }

    /// True iff every stored coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Truncate (or keep) to at most `prec` coefficients.
    pub fn truncate(&self, prec: usize) -> QSeries {
        QSeries::new(self.coeffs[..prec.min(self.prec()).max(1)].to_vec(), self.weight)
    }

    /// Coefficientwise sum at the minimum precision; the weight tag survives
    /// only when both agree.
    pub fn add(&self, other: &QSeries) -> QSeries {
        let prec = self.prec().min(other.prec());
        let weight = match (self.weight, other.weight) {
            (Some(a), Some(b)) if a == b => Some(a),
            _ => None,
        };
        QSeries::new(
            (0..prec).map(|n| &self.coeffs[n] + &other.coeffs[n]).collect(),
            weight,
        )
    }

    /// Coefficientwise difference at the minimum precision.
    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> QSeries {
        QSeries::new(self.coeffs.iter().map(|c| -c.clone()).collect(), self.weight)
    }

    /// Scalar multiple (weight tag preserved).
    pub fn scale(&self, s: &Rat) -> QSeries {
        QSeries::new(self.coeffs.iter().map(|c| c * s).collect(), self.weight)
    }

    /// Multiply by `q^j` (weight tag preserved, coefficients shift up).
    pub fn shift(&self, j: usize) -> QSeries {
        let prec = self.prec();
        QSeries::from_fn(
            prec,
            |n| {
                if n >= j {
                    self.coeffs[n - j].clone()
                } else {
                    Rat::zero()
                }
            },
            self.weight,
        )
    }

    /// Cauchy product truncated to the minimum precision. Weight tags add
    /// when both are present. Integer-coefficient inputs take the fast
    /// `BigInt` convolution path (Karatsuba above the size threshold).
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let prec = self.prec().min(other.prec());
        let weight = match (self.weight, other.weight) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        let a = &self.coeffs[..prec];
        let b = &other.coeffs[..prec];
        let integral =
            a.iter().all(|c| c.denom().is_one()) && b.iter().all(|c| c.denom().is_one());
        let coeffs = if integral {
            let ai: Vec<Int> = a.iter().map(|c| c.numer().clone()).collect();
            let bi: Vec<Int> = b.iter().map(|c| c.numer().clone()).collect();
            let mut full = int_convolve(&ai, &bi);
            full.truncate(prec);
            full.resize(prec, Int::zero());
            full.into_iter().map(Rat::from_integer).collect()
        } else {
            let mut out = vec![Rat::zero(); prec];
            for (i, ai) in a.iter().enumerate() {
                if ai.is_zero() {
                    continue;
                }
                for (j, bj) in b.iter().take(prec - i).enumerate() {
                    if !bj.is_zero() {
                        out[i + j] += ai * bj;
                    }
                }
            }
            out
        };
        QSeries::new(coeffs, weight)
    }

    /// Power by repeated squaring (weight tag scales with the exponent).
    pub fn pow(&self, e: u64) -> QSeries {
        let mut result = QSeries::one(self.prec()).with_weight(Some(0));
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// JSON form `{"weight": k|null, "prec": N, "coeffs": ["num/den", …]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "weight": self.weight,
            "prec": self.prec(),
            "coeffs": self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// The Cauchy product of two series (free function form).
pub fn series_product(f: &QSeries, g: &QSeries) -> QSeries {
    f.mul(g)
}

/// Full integer polynomial product `(Σ a_i x^i)(Σ b_j x^j)`, length
/// `a.len() + b.len() − 1`; schoolbook below [`KARATSUBA_THRESHOLD`],
/// Karatsuba above.
fn int_convolve(a: &[Int], b: &[Int]) -> Vec<Int> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len().min(b.len()) <= KARATSUBA_THRESHOLD {
        let mut out = vec![Int::zero(); a.len() + b.len() - 1];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if !bj.is_zero() {
                    out[i + j] += ai * bj;
                }
            }
        }
        return out;
    }
    // Karatsuba: a = a0 + x^m a1, b = b0 + x^m b1,
    // ab = z0 + x^m (z1 − z0 − z2) + x^{2m} z2 with z1 = (a0+a1)(b0+b1).
    let m = a.len().max(b.len()).div_ceil(2);
    let (a0, a1) = a.split_at(m.min(a.len()));
    let (b0, b1) = b.split_at(m.min(b.len()));
    let z0 = int_convolve(a0, b0);
    let z2 = int_convolve(a1, b1);
    let z1 = int_convolve(&poly_add(a0, a1), &poly_add(b0, b1));
    let mut out = vec![Int::zero(); a.len() + b.len() - 1];
    for (i, c) in z0.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in z1.iter().enumerate() {
        out[m + i] += c;
    }
    for (i, c) in z0.iter().enumerate() {
        out[m + i] -= c;
    }
    for (i, c) in z2.iter().enumerate() {
        out[m + i] -= c;
    }
    for (i, c) in z2.iter().enumerate() {
        out[2 * m + i] += c;
    }
    out
}

fn poly_add(a: &[Int], b: &[Int]) -> Vec<Int> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(Int::zero);
            let y = b.get(i).cloned().unwrap_or_else(Int::zero);
            x + y
        })
        .collect()
}

/// The divisor power sum `σ_e(n) = Σ_{d | n} d^e`.
pub fn sigma(n: u64, e: u32) -> Int {
    let mut acc = Int::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            acc += Int::from(d).pow(e);
            let q = n / d;
            if q != d {
                acc += Int::from(q).pow(e);
            }
        }
        d += 1;
    }
    acc
}

/// The normalized Eisenstein series of even weight `k ≥ 4`:
///
/// ```text
///   E_k = 1 − (2k / B_k) Σ_{n ≥ 1} σ_{k−1}(n) q^n,
/// ```
///
/// weight tag `k`, constant term exactly 1.
pub fn eisenstein(k: i64, prec: usize) -> Result<QSeries> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::invalid(format!(
            "eisenstein requires even weight k >= 4, got {k}"
        )));
    }
    let factor = -rat(2 * k) / bernoulli(k as u64);
    Ok(QSeries::from_fn(
        prec,
        |n| {
            if n == 0 {
                Rat::one()
            } else {
                &factor * Rat::from_integer(sigma(n as u64, (k - 1) as u32))
            }
        },
        Some(k),
    ))
}

/// The discriminant cusp form
///
/// ```text
///   Δ = q Π_{n ≥ 1} (1 − q^n)^{24},
/// ```
///
/// expanded via the pentagonal-number theorem for `Π(1 − q^n)` and repeated
/// squaring for the 24th power. Integer coefficients, `a_0 = 0`, `a_1 = 1`,
/// weight tag 12.
pub fn delta_series(prec: usize) -> QSeries {
    let prec = prec.max(1);
    // Euler function: Π(1−q^n) = Σ_j (−1)^j q^{j(3j−1)/2} over all j ∈ Z.
    let mut euler = vec![Rat::zero(); prec];
    let mut j: i64 = 0;
    loop {
        let mut hit = false;
        for jj in [j, -j] {
            let e = jj * (3 * jj - 1) / 2;
            if e >= 0 && (e as usize) < prec {
                hit = true;
                let sign = if jj.rem_euclid(2) == 0 { 1 } else { -1 };
                euler[e as usize] += rat(sign);
            }
            if jj == 0 {
                break;
            }
        }
        if !hit && j > 0 {
            break;
        }
        j += 1;
    }
    let euler = QSeries::new(euler, Some(0));
    euler.pow(24).shift(1).with_weight(Some(12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{p_valuation, ratio, Valuation};
    use proptest::prelude::*;

    #[test]
    fn eisenstein_small_weights() {
        // E_4 = 1 + 240q + 2160q² + …, E_6 = 1 − 504q − 16632q² − …
        let e4 = eisenstein(4, 3).unwrap();
        assert_eq!(e4.coeffs(), &[rat(1), rat(240), rat(2160)]);
        assert_eq!(e4.weight(), Some(4));
        let e6 = eisenstein(6, 3).unwrap();
        assert_eq!(e6.coeffs(), &[rat(1), rat(-504), rat(-16632)]);
        assert!(eisenstein(5, 3).is_err());
        assert!(eisenstein(2, 3).is_err());
    }

    #[test]
    fn product_examples() {
        // 1 · g = g
        let g = QSeries::new(vec![rat(3), ratio(1, 2), rat(-7)], Some(8));
        assert_eq!(QSeries::one(3).mul(&g).coeffs(), g.coeffs());
        // (1 + q)² = 1 + 2q + q²
        let f = QSeries::new(vec![rat(1), rat(1), rat(0)], None);
        assert_eq!(f.mul(&f).coeffs(), &[rat(1), rat(2), rat(1)]);
        // E_4·Δ = q + 216q² − 3348q³ + … (hand multiply:
        //   a_2 = 240·1 + 1·(−24) = 216, a_3 = 2160 − 24·240 + 252 = −3348)
        let e4 = eisenstein(4, 4).unwrap();
        let d = delta_series(4);
        let fd = e4.mul(&d);
        assert_eq!(fd.coeffs(), &[rat(0), rat(1), rat(216), rat(-3348)]);
        assert_eq!(fd.weight(), Some(16));
    }

    #[test]
    fn delta_first_coefficients() {
        // Δ = q − 24q² + 252q³ − 1472q⁴ + 4830q⁵ − 6048q⁶ …
        let d = delta_series(7);
        assert_eq!(
            d.coeffs(),
            &[rat(0), rat(1), rat(-24), rat(252), rat(-1472), rat(4830), rat(-6048)]
        );
        assert_eq!(d.weight(), Some(12));
    }

    #[test]
    fn delta_equals_eisenstein_combination() {
        // Δ = (E_4³ − E_6²)/1728 — two wholly independent constructions.
        let prec = 20;
        let e4 = eisenstein(4, prec).unwrap();
        let e6 = eisenstein(6, prec).unwrap();
        let alt = e4.pow(3).sub(&e6.pow(2)).scale(&ratio(1, 1728));
        assert_eq!(delta_series(prec).coeffs(), alt.coeffs());
    }

    #[test]
    fn eisenstein_p_minus_one_is_one_mod_p() {
        // every coefficient of E_{p−1} − 1 has ν_p ≥ 1
        for p in [5u64, 7, 11, 13] {
            let e = eisenstein((p - 1) as i64, 20).unwrap();
            for (n, c) in e.coeffs().iter().enumerate().skip(1) {
                assert!(
                    p_valuation(c, p) >= Valuation::Finite(1),
                    "p={p}, coefficient {n}"
                );
            }
        }
    }

    #[test]
    fn eisenstein_integrality_away_from_k() {
        // coefficients of E_k are p-integral whenever (p−1) ∤ k
        for (k, p) in [(4i64, 7u64), (6, 5), (8, 11), (12, 11), (16, 7)] {
            assert_ne!((k as u64) % (p - 1), 0);
            let e = eisenstein(k, 15).unwrap();
            for c in e.coeffs() {
                assert!(crate::arith::is_p_integral(c, p), "k={k}, p={p}");
            }
        }
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(2, 3), Int::from(9)); // 1 + 8
        assert_eq!(sigma(6, 1), Int::from(12)); // 1+2+3+6
        assert_eq!(sigma(5, 11), Int::from(48828126)); // 1 + 5^11
    }

    #[test]
    fn weight_tags() {
        let e4 = eisenstein(4, 5).unwrap();
        let e6 = eisenstein(6, 5).unwrap();
        assert_eq!(e4.mul(&e6).weight(), Some(10));
        assert_eq!(e4.mul(&QSeries::zero(5)).weight(), None);
        assert_eq!(e4.add(&e6).weight(), None); // mismatched tags drop
        assert_eq!(e4.add(&e4).weight(), Some(4));
        assert_eq!(e4.pow(3).weight(), Some(12));
    }

    #[test]
    fn mixed_precision_truncates() {
        let a = QSeries::new(vec![rat(1); 10], None);
        let b = QSeries::new(vec![rat(1); 4], None);
        assert_eq!(a.mul(&b).prec(), 4);
        assert_eq!(a.add(&b).prec(), 4);
    }

    #[test]
    fn json_shape() {
        let d = delta_series(3);
        let v = d.to_json();
        assert_eq!(v["weight"], 12);
        assert_eq!(v["prec"], 3);
        assert_eq!(v["coeffs"][1], "1");
        assert_eq!(v["coeffs"][2], "-24");
    }

    /// Naive full integer convolution, as the Karatsuba oracle.
    fn naive_convolve(a: &[Int], b: &[Int]) -> Vec<Int> {
        let mut out = vec![Int::zero(); a.len() + b.len() - 1];
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                out[i + j] += ai * bj;
            }
        }
        out
    }

    #[test]
    fn karatsuba_matches_naive_on_long_series() {
        // deterministic pseudo-random integers, length >> threshold
        let a: Vec<Int> = (0..300u64)
            .map(|i| Int::from((i * 2654435761) % 2001) - Int::from(1000))
            .collect();
        let b: Vec<Int> = (0..251u64)
            .map(|i| Int::from((i * 40503) % 1787) - Int::from(893))
            .collect();
        assert_eq!(int_convolve(&a, &b), naive_convolve(&a, &b));
    }

    proptest! {
        /// Commutativity and associativity of the product, exactly.
        #[test]
        fn product_commutative_associative(
            av in proptest::collection::vec((-9i64..9, 1i64..4), 1..30),
            bv in proptest::collection::vec((-9i64..9, 1i64..4), 1..30),
            cv in proptest::collection::vec((-9i64..9, 1i64..4), 1..30),
        ) {
            let mk = |v: &[(i64, i64)]| {
                QSeries::new(v.iter().map(|&(n, d)| ratio(n, d)).collect(), None)
            };
            let (a, b, c) = (mk(&av), mk(&bv), mk(&cv));
            let ab = a.mul(&b);
            let ba = b.mul(&a);
            prop_assert_eq!(ab.coeffs(), ba.coeffs());
            let left = a.mul(&b).mul(&c);
            let right = a.mul(&b.mul(&c));
            prop_assert_eq!(left.coeffs(), right.coeffs());
        }

        /// The integer fast path agrees with the generic rational product.
        #[test]
        fn integer_path_matches_rational_path(
            av in proptest::collection::vec(-50i64..50, 1..120),
            bv in proptest::collection::vec(-50i64..50, 1..120),
        ) {
            let a = QSeries::new(av.iter().map(|&n| rat(n)).collect(), None);
            let b = QSeries::new(bv.iter().map(|&n| rat(n)).collect(), None);
            // force the rational path by a denominator that cancels
            let a_rat = a.scale(&ratio(1, 7));
            let product_int = a.mul(&b);
            let product_rat = a_rat.mul(&b).scale(&rat(7));
            prop_assert_eq!(product_int.coeffs(), product_rat.coeffs());
        }
    }
}
