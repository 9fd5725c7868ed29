//! Scalar primitives: the `Q_ρ` family, its conjugate, the hint-correction
//! penalty `Φ_ξ`, dual norm pairs and the Kullback–Leibler divergence.
//!
//! `Q_ρ(x) = ½x² + χ_[-ρ,ρ](x)` is the modulus used by every instantiated
//! regularizer; its conjugate `Q_ρ*(k) = ½k² − ½(|k| − ρ)₊²` is what shows up
//! in the penalty terms of the regret bounds.

use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{norm1, norm2, norm_inf, sub};

/// Entries of a probability vector below this are treated as exact zeros.
pub const KL_ZERO: f64 = 1e-300;

/// Extended positive real radius `ρ ∈ (0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rho {
    Finite(f64),
    Infinite,
}

impl Rho {
    /// Accepts any `v > 0`; `f64::INFINITY` maps to [`Rho::Infinite`].
    pub fn new(v: f64) -> Result<Self> {
        if v.is_nan() || v <= 0.0 {
            return Err(Error::InvalidParameter(alloc::format!("rho must be > 0, got {v}")));
        }
        if v.is_infinite() {
            Ok(Rho::Infinite)
        } else {
            Ok(Rho::Finite(v))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Rho::Finite(r) => r,
            Rho::Infinite => f64::INFINITY,
        }
    }

    /// `(a − ρ)₊`, exactly zero when `ρ = ∞`.
    pub fn excess(self, a: f64) -> f64 {
        match self {
            Rho::Finite(r) => (a - r).max(0.0),
            Rho::Infinite => 0.0,
        }
    }

    /// `min{a, ρ}`.
    pub fn cap(self, a: f64) -> f64 {
        match self {
            Rho::Finite(r) => a.min(r),
            Rho::Infinite => a,
        }
    }
}

/// `Q_ρ(x)`; returns `f64::INFINITY` outside `[-ρ, ρ]`.
pub fn q_rho(x: f64, rho: Rho) -> f64 {
    match rho {
        Rho::Finite(r) if x.abs() > r => f64::INFINITY,
        _ => 0.5 * x * x,
    }
}

/// `Q_ρ*(k) = ½k² − ½(|k| − ρ)₊²`.
pub fn q_rho_star(k: f64, rho: Rho) -> f64 {
    let e = rho.excess(k.abs());
    0.5 * k * k - 0.5 * e * e
}

/// The convexity modulus `φ = Q_ρ` of a regularizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexModulus {
    rho: Rho,
}

impl ConvexModulus {
    pub fn new(rho: Rho) -> Self {
        Self { rho }
    }

    /// `φ = ½(·)²`, plain 1-strong convexity.
    pub fn strongly_convex() -> Self {
        Self { rho: Rho::Infinite }
    }

    pub fn rho(&self) -> Rho {
        self.rho
    }

    pub fn phi(&self, x: f64) -> f64 {
        q_rho(x, self.rho)
    }

    pub fn phi_star(&self, k: f64) -> f64 {
        q_rho_star(k, self.rho)
    }
}

/// A primal norm together with its dual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormPair {
    /// `‖·‖₁` on the primal side, `‖·‖∞` on the dual side.
    L1Linf,
    /// Euclidean on both sides.
    L2L2,
}

impl NormPair {
    pub fn primal(&self, v: &[f64]) -> f64 {
        match self {
            NormPair::L1Linf => norm1(v),
            NormPair::L2L2 => norm2(v),
        }
    }

    pub fn dual(&self, v: &[f64]) -> f64 {
        match self {
            NormPair::L1Linf => norm_inf(v),
            NormPair::L2L2 => norm2(v),
        }
    }
}

/// Retrospective hint correction `ŷ* = λx̂* + (1 − λ)x*` with
/// `λ = min{‖x*‖ / ‖x* − x̂*‖, 1}`.
///
/// A perfect hint (`‖x* − x̂*‖ = 0`) yields `λ = 1`.
pub fn hint_interpolate(g: &[f64], h: &[f64], norms: NormPair) -> Result<(f64, Vec<f64>)> {
    check_dim(g.len(), h.len())?;
    let err = norms.dual(&sub(g, h));
    let lambda = if err == 0.0 {
        1.0
    } else {
        (norms.dual(g) / err).min(1.0)
    };
    let corrected = h
        .iter()
        .zip(g)
        .map(|(hi, gi)| lambda * hi + (1.0 - lambda) * gi)
        .collect();
    Ok((lambda, corrected))
}

/// Closed form of the auxiliary penalty
/// `Φ_ξ(x*, x̂*) = Q_ρ*(ξ min{‖x* − x̂*‖, ‖x*‖}) + ξ‖x*‖ min{ξ(‖x* − x̂*‖ − ‖x*‖)₊, ρ}`.
pub fn phi_cap(g: &[f64], h: &[f64], xi: f64, rho: Rho, norms: NormPair) -> Result<f64> {
    check_dim(g.len(), h.len())?;
    if !(xi > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("xi must be > 0, got {xi}")));
    }
    let err = norms.dual(&sub(g, h));
    let gn = norms.dual(g);
    Ok(phi_cap_scalar(err, gn, xi, rho))
}

/// [`phi_cap`] in terms of the two dual norms `‖x* − x̂*‖` and `‖x*‖`.
pub fn phi_cap_scalar(err: f64, grad_norm: f64, xi: f64, rho: Rho) -> f64 {
    let head = q_rho_star(xi * err.min(grad_norm), rho);
    let excess = xi * (err - grad_norm).max(0.0);
    if excess == 0.0 || grad_norm == 0.0 {
        return head;
    }
    head + xi * grad_norm * rho.cap(excess)
}

/// `Σ uᵢ ln(uᵢ / wᵢ)` with `0 · ln 0 = 0`.
pub fn kl(u: &[f64], w: &[f64]) -> Result<f64> {
    check_dim(u.len(), w.len())?;
    let mut acc = 0.0;
    for (&ui, &wi) in u.iter().zip(w) {
        if ui < KL_ZERO {
            continue;
        }
        if wi <= 0.0 {
            return Err(Error::OutsideDomain(
                "kl: reference has a zero entry where the argument is positive".into(),
            ));
        }
        acc += ui * (libm::log(ui) - libm::log(wi));
    }
    Ok(acc.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const INF: Rho = Rho::Infinite;

    fn fin(r: f64) -> Rho {
        Rho::new(r).unwrap()
    }

    /// Brute-force conjugate `sup_{|x| ≤ ρ} (k x − ½x²)` on a uniform grid.
    fn grid_conjugate(k: f64, rho: f64, points: usize) -> f64 {
        (0..=points)
            .map(|i| -rho + 2.0 * rho * i as f64 / points as f64)
            .map(|x| k * x - 0.5 * x * x)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Q_ρ*(ξ‖g − ŷ‖) + inf_γ [(1/γ)Q_ρ*(γξ‖g‖) + (1/γ)Q_ρ*(ξ‖ĥ − ŷ‖)]` by
    /// log-spaced grid search over γ.
    fn phi_cap_gamma_oracle(g: &[f64], h: &[f64], xi: f64, rho: Rho, norms: NormPair) -> f64 {
        let (_, y) = hint_interpolate(g, h, norms).unwrap();
        let a = norms.dual(&sub(g, &y));
        let b = norms.dual(&sub(h, &y));
        let gn = norms.dual(g);
        let head = q_rho_star(xi * a, rho);
        let tail = q_rho_star(xi * b, rho);
        if tail == 0.0 {
            // γ → 0 drives the first term to 0 as well
            return head;
        }
        let mut best = f64::INFINITY;
        for i in 0..=40_000 {
            let gamma = libm::pow(10.0, -8.0 + 16.0 * i as f64 / 40_000.0);
            let v = (q_rho_star(gamma * xi * gn, rho) + tail) / gamma;
            best = best.min(v);
        }
        head + best
    }

    #[test]
    fn q_rho_examples() {
        assert_eq!(q_rho(0.0, fin(2.0)), 0.0);
        assert_eq!(q_rho(1.0, fin(2.0)), 0.5);
        assert_eq!(q_rho(3.0, fin(2.0)), f64::INFINITY);
        assert_eq!(q_rho(1e6, INF), 0.5e12);
    }

    #[test]
    fn q_rho_star_examples() {
        assert_eq!(q_rho_star(1.0, fin(2.0)), 0.5);
        assert_eq!(q_rho_star(3.0, fin(2.0)), 4.0);
        assert_eq!(q_rho_star(3.0, INF), 4.5);
        assert!((grid_conjugate(3.0, 2.0, 10_000) - 4.0).abs() < 1e-6);
        assert!(!q_rho_star(1e300, INF).is_nan());
    }

    #[test]
    fn rho_rejects_non_positive() {
        assert!(Rho::new(0.0).is_err());
        assert!(Rho::new(-1.0).is_err());
        assert!(Rho::new(f64::NAN).is_err());
        assert_eq!(Rho::new(f64::INFINITY).unwrap(), Rho::Infinite);
    }

    #[test]
    fn hint_interpolate_examples() {
        let (l, c) = hint_interpolate(&[1.0, 0.0], &[3.0, 0.0], NormPair::L2L2).unwrap();
        assert_eq!(l, 0.5);
        assert_eq!(c, vec![2.0, 0.0]);
        // ‖g − corrected‖ = min{‖g − h‖, ‖g‖}
        assert!((norm2(&sub(&[1.0, 0.0], &c)) - 1.0).abs() < 1e-15);

        for norms in [NormPair::L1Linf, NormPair::L2L2] {
            let (l, c) = hint_interpolate(&[1.0, 0.0], &[1.0, 0.0], norms).unwrap();
            assert_eq!(l, 1.0);
            assert_eq!(c, vec![1.0, 0.0]);
        }

        let (l, c) = hint_interpolate(&[0.0, 0.0], &[1.0, 0.0], NormPair::L2L2).unwrap();
        assert_eq!(l, 0.0);
        assert_eq!(c, vec![0.0, 0.0]);
    }

    #[test]
    fn phi_cap_examples() {
        let l2 = NormPair::L2L2;
        let v = phi_cap(&[1.0, 0.0], &[3.0, 0.0], 1.0, INF, l2).unwrap();
        assert!((v - 1.5).abs() < 1e-15);
        assert_eq!(phi_cap(&[1.0, 0.0], &[1.0, 0.0], 1.0, fin(2.0), l2).unwrap(), 0.0);
        let v = phi_cap(&[1.0, 0.0], &[3.0, 0.0], 1.0, fin(0.5), l2).unwrap();
        assert!((v - 0.875).abs() < 1e-15);

        for (rho, expect) in [(INF, 1.5), (fin(0.5), 0.875)] {
            let o = phi_cap_gamma_oracle(&[1.0, 0.0], &[3.0, 0.0], 1.0, rho, l2);
            assert!((o - expect).abs() < 1e-6, "oracle {o} vs {expect}");
        }
        assert!(phi_cap(&[1.0], &[0.0], 0.0, INF, l2).is_err());
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        assert!((kl(&[1.0, 0.0], &[0.5, 0.5]).unwrap() - 0.693_147_180_559_945_3).abs() < 1e-12);
        let v = kl(&[0.25, 0.75], &[0.5, 0.5]).unwrap();
        let direct = 0.25 * libm::log(0.5) + 0.75 * libm::log(1.5);
        assert!((v - direct).abs() < 1e-15);
        assert!((v - 0.130_812).abs() < 1e-6);
        assert!(kl(&[0.5, 0.5], &[1.0, 0.0]).is_err());
        assert!(kl(&[0.0, 1.0], &[0.0, 1.0]).is_ok());
    }

    #[test]
    fn norm_pair_duals() {
        let v = [1.0, -3.0, 2.0];
        assert_eq!(NormPair::L1Linf.primal(&v), 6.0);
        assert_eq!(NormPair::L1Linf.dual(&v), 3.0);
        assert!((NormPair::L2L2.dual(&v) - libm::sqrt(14.0)).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rho_strategy() -> impl Strategy<Value = Rho> {
            prop_oneof![Just(Rho::Infinite), (0.05f64..5.0).prop_map(Rho::Finite)]
        }

        fn vec2() -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(-3.0f64..3.0, 3)
        }

        proptest! {
            #[test]
            fn fenchel_young(x in -5.0f64..5.0, k in -10.0f64..10.0, rho in rho_strategy()) {
                prop_assume!(x.abs() <= rho.value());
                prop_assert!(q_rho(x, rho) + q_rho_star(k, rho) >= k * x - 1e-10);
                // equality on the graph: k = x inside the interval
                prop_assert!((q_rho(x, rho) + q_rho_star(x, rho) - x * x).abs() < 1e-10);
            }

            #[test]
            fn q_rho_star_matches_grid(k in -6.0f64..6.0, r in 0.1f64..4.0) {
                let grid = grid_conjugate(k, r, 10_000);
                let h = 2.0 * r / 10_000.0;
                // grid maximum misses the true one by at most |k|h + h²
                let v = q_rho_star(k, Rho::Finite(r));
                prop_assert!(v >= grid - 1e-12);
                prop_assert!(v - grid <= k.abs() * h + h * h);
            }

            #[test]
            fn q_rho_star_shape(a in 0.0f64..10.0, b in 0.0f64..10.0, rho in rho_strategy()) {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                prop_assert!(q_rho_star(lo, rho) <= q_rho_star(hi, rho) + 1e-12);
                prop_assert!(q_rho_star(lo, rho) >= 0.0);
                prop_assert!(q_rho_star(lo, rho) <= q_rho_star(lo, Rho::Infinite) + 1e-12);
            }

            #[test]
            fn phi_cap_matches_gamma_oracle(
                g in vec2(), h in vec2(), xi in 0.05f64..3.0, rho in rho_strategy(), l1 in any::<bool>()
            ) {
                let norms = if l1 { NormPair::L1Linf } else { NormPair::L2L2 };
                let v = phi_cap(&g, &h, xi, rho, norms).unwrap();
                let o = phi_cap_gamma_oracle(&g, &h, xi, rho, norms);
                prop_assert!((v - o).abs() <= 1e-6 * (1.0 + v.abs()), "closed {} oracle {}", v, o);
            }

            #[test]
            fn phi_cap_upper_line(
                g in vec2(), h in vec2(), xi in 0.05f64..3.0, rho in rho_strategy()
            ) {
                let norms = NormPair::L2L2;
                let gn = norms.dual(&g);
                prop_assume!(gn > 1e-9);
                let err = norms.dual(&sub(&g, &h));
                let v = phi_cap(&g, &h, xi, rho, norms).unwrap();
                let e = rho.excess(xi * err.min(gn));
                let upper = xi * xi * q_rho_star(err, Rho::Finite(gn)) - 0.5 * e * e;
                prop_assert!(v <= upper + 1e-10);
            }

            #[test]
            fn pinsker(a in proptest::collection::vec(0.01f64..1.0, 4), b in proptest::collection::vec(0.01f64..1.0, 4)) {
                let sa: f64 = a.iter().sum();
                let sb: f64 = b.iter().sum();
                let u: Vec<f64> = a.iter().map(|x| x / sa).collect();
                let w: Vec<f64> = b.iter().map(|x| x / sb).collect();
                let d = norm1(&sub(&u, &w));
                prop_assert!(kl(&u, &w).unwrap() >= 0.5 * d * d - 1e-12);
            }
        }
    }
}
