//! Exact-arithmetic computations around level-1 modular forms and Hecke
//! operators, together with the commutator cohomology that measures how far
//! Hecke operators are from commuting with multiplication by powers of
//! `E_{p-1}`, the upper-triangular Hecke action on two-cell modules
//! `M_k ⊕ M_{k-(p-1)n}` that this cohomology controls, and a truncated cobar
//! complex for the Hopf algebroid `(Z_(p)[v_1], Z_(p)[v_1][t_1])` whose
//! `Ext^1` groups exhibit the same `p^{1+ν_p(n)}` order pattern.
//!
//! Everything is computed over `Q` (or quadratic extensions `Q(√d)`) with
//! `num::BigRational`; there are no floating-point numbers anywhere in the
//! crate, and every stated identity is asserted exactly.
//!
//! Module map:
//! - [`arith`] — Bernoulli numbers, p-adic valuations, binomial sums.
//! - [`linalg`] — exact matrices, kernels, characteristic polynomials, Smith
//!   normal form, solvability of linear systems over `Z_(p)`, and the
//!   quadratic-extension scalar type.
//! - [`qseries`] — truncated q-expansions with exact coefficients;
//!   Eisenstein series and Δ.
//! - [`modforms`] — dimensions, the Miller echelon basis, Hecke matrices,
//!   eigencharacters, and the disk cache.
//! - [`derived`] — iterated-commutator operators `D_n`/`Δ_n`, the cocycle
//!   `κ_n`, coboundary tests, class orders, and the dot-cup pairing.
//! - [`topo`] — two-cell modules, joint eigenforms, the classification
//!   routine, multiplicity-one checks, and extension obstructions.
//! - [`cobar`] — the truncated cobar complex, the cocycles `σ_n`, `Ext^1`
//!   orders, and the twisted-complex forcing of `ζ(1)`.
//! - [`selftest`] — the full acceptance grid, shared by the integration
//!   tests and the CLI.

pub mod arith;
pub mod cobar;
pub mod derived;
pub mod error;
pub mod linalg;
pub mod modforms;
pub mod qseries;
pub mod selftest;
pub mod topo;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
