//! Regularizers `ψ` with their mirror step `∂ψ*`, a canonical dual image
//! selection from `∂ψ` and the generalized Bregman divergence
//! `B_ψ(x, y*) = ψ(x) + ψ*(y*) − ⟨y*, x⟩`.
//!
//! Entropy work stays in the log domain: the mirror step is a max-shifted
//! softmax and `ψ*` is a stabilized log-sum-exp, so large cumulative dual
//! sums never overflow.

use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dist2, dot, norm2, sub};
use crate::math::{ConvexModulus, NormPair, Rho};
use crate::sets::FeasibleSet;

/// Membership slack for arguments of `ψ` and `B_ψ`.
const DOMAIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MirrorKind {
    /// `ψ(x) = Σ xᵢ ln xᵢ` on the probability simplex.
    Entropy,
    /// `ψ(x) = ½‖x‖²` restricted to a closed convex set.
    SquaredNorm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MirrorMap {
    kind: MirrorKind,
    domain: FeasibleSet,
    norms: NormPair,
    modulus: ConvexModulus,
    anchor: Vec<f64>,
    anchor_dual: Vec<f64>,
}

/// `max(v) + ln Σ e^{vᵢ − max(v)}`
pub fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + libm::log(v.iter().map(|x| libm::exp(x - m)).sum::<f64>())
}

/// `vᵢ − log_sum_exp(v)`
pub fn log_softmax(v: &[f64]) -> Vec<f64> {
    let l = log_sum_exp(v);
    v.iter().map(|x| x - l).collect()
}

pub fn softmax(v: &[f64]) -> Vec<f64> {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = v.iter().map(|x| libm::exp(x - m)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

impl MirrorMap {
    /// Negative entropy on `simplex(dim)` anchored at the uniform vector.
    pub fn entropy(dim: usize) -> Result<Self> {
        Self::entropy_with_anchor(alloc::vec![1.0 / dim.max(1) as f64; dim])
    }

    /// Negative entropy anchored at `a`, which must be strictly positive.
    pub fn entropy_with_anchor(a: Vec<f64>) -> Result<Self> {
        let domain = FeasibleSet::simplex(a.len())?;
        if !domain.membership(&a, DOMAIN_TOL) || a.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::InvalidParameter(
                "entropy anchor must be a strictly positive probability vector".into(),
            ));
        }
        let anchor_dual = a.iter().map(|x| 1.0 + libm::log(*x)).collect();
        Ok(Self {
            kind: MirrorKind::Entropy,
            domain,
            norms: NormPair::L1Linf,
            modulus: ConvexModulus::new(Rho::Finite(2.0)),
            anchor: a,
            anchor_dual,
        })
    }

    /// Squared norm on `set`, anchored at its center.
    pub fn squared_norm(set: FeasibleSet) -> Result<Self> {
        let a = set.center();
        Self::squared_norm_with_anchor(set, a)
    }

    pub fn squared_norm_with_anchor(set: FeasibleSet, a: Vec<f64>) -> Result<Self> {
        check_dim(set.dim(), a.len())?;
        if !set.membership(&a, DOMAIN_TOL) {
            return Err(Error::InvalidParameter("anchor must lie in the feasible set".into()));
        }
        let rho = Rho::new(set.diameter_in(NormPair::L2L2))?;
        Ok(Self {
            kind: MirrorKind::SquaredNorm,
            norms: NormPair::L2L2,
            modulus: ConvexModulus::new(rho),
            anchor_dual: a.clone(),
            anchor: a,
            domain: set,
        })
    }

    /// Same map with `φ = ½(·)²`, i.e. `ρ = ∞`. Used to compare bounds.
    pub fn with_infinite_rho(&self) -> Self {
        let mut m = self.clone();
        m.modulus = ConvexModulus::strongly_convex();
        m
    }

    pub fn kind(&self) -> MirrorKind {
        self.kind
    }

    pub fn domain(&self) -> &FeasibleSet {
        &self.domain
    }

    pub fn norms(&self) -> NormPair {
        self.norms
    }

    pub fn modulus(&self) -> ConvexModulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    /// The anchor point `a ∈ C`.
    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    /// `a^ψ ∈ ∂ψ(a)`.
    pub fn anchor_dual(&self) -> &[f64] {
        &self.anchor_dual
    }

    fn check_in_domain(&self, x: &[f64]) -> Result<()> {
        check_dim(self.dim(), x.len())?;
        let ok = self.domain.membership(x, DOMAIN_TOL)
            && (self.kind != MirrorKind::Entropy || x.iter().all(|&v| v >= 0.0));
        if ok {
            Ok(())
        } else {
            Err(Error::OutsideDomain("point is not in the feasible set".into()))
        }
    }

    /// `ψ(x)` for `x ∈ C`.
    pub fn psi(&self, x: &[f64]) -> Result<f64> {
        self.check_in_domain(x)?;
        Ok(match self.kind {
            MirrorKind::Entropy => x
                .iter()
                .filter(|&&v| v > 0.0)
                .map(|&v| v * libm::log(v))
                .sum(),
            MirrorKind::SquaredNorm => 0.5 * dot(x, x),
        })
    }

    /// `ψ*(v)`: log-sum-exp for entropy, `½‖v‖² − ½‖v − P_C v‖²` for the
    /// squared norm.
    pub fn psi_star(&self, v: &[f64]) -> Result<f64> {
        check_dim(self.dim(), v.len())?;
        Ok(match self.kind {
            MirrorKind::Entropy => log_sum_exp(v),
            MirrorKind::SquaredNorm => {
                let p = self.domain.project(v)?;
                let r = dist2(v, &p);
                0.5 * dot(v, v) - 0.5 * r * r
            }
        })
    }

    /// The unique point of `∂ψ*(d)`, always inside `C`.
    pub fn mirror_step(&self, d: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), d.len())?;
        match self.kind {
            MirrorKind::Entropy => Ok(softmax(d)),
            MirrorKind::SquaredNorm => self.domain.project(d),
        }
    }

    /// Canonical selection from `∂ψ(x)`: `1 + ln x` or `x`.
    pub fn dual_image(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_in_domain(x)?;
        match self.kind {
            MirrorKind::Entropy => {
                if x.iter().any(|&v| !(v > 0.0)) {
                    return Err(Error::OutsideDomain(
                        "entropy dual image needs strictly positive coordinates".into(),
                    ));
                }
                Ok(x.iter().map(|v| 1.0 + libm::log(*v)).collect())
            }
            MirrorKind::SquaredNorm => Ok(x.to_vec()),
        }
    }

    /// `dual_image(mirror_step(d))` without leaving the log domain, so it
    /// never fails on underflowing coordinates.
    pub fn reselect(&self, d: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), d.len())?;
        match self.kind {
            MirrorKind::Entropy => Ok(log_softmax(d).into_iter().map(|v| 1.0 + v).collect()),
            MirrorKind::SquaredNorm => self.domain.project(d),
        }
    }

    /// `B_ψ(x, y*)` for `x ∈ C`.
    ///
    /// Entropy: `Σ xᵢ(ln xᵢ − log_softmax(y*)ᵢ)`. Squared norm:
    /// `½‖x − y*‖² − ½‖y* − P_C y*‖²`. Both are algebraically equal to the
    /// defining expression but avoid cancellation.
    pub fn bregman(&self, x: &[f64], y_dual: &[f64]) -> Result<f64> {
        self.check_in_domain(x)?;
        check_dim(self.dim(), y_dual.len())?;
        Ok(match self.kind {
            MirrorKind::Entropy => {
                let ls = log_softmax(y_dual);
                x.iter()
                    .zip(&ls)
                    .filter(|(&xi, _)| xi > 0.0)
                    .map(|(&xi, &li)| xi * (libm::log(xi) - li))
                    .sum::<f64>()
            }
            MirrorKind::SquaredNorm => {
                let p = self.domain.project(y_dual)?;
                let d = dist2(x, y_dual);
                let r = dist2(y_dual, &p);
                0.5 * (d - r) * (d + r)
            }
        })
    }

    /// `B_ψ(x, dual_image(y))`: KL divergence for entropy, `½‖x − y‖²` for the
    /// squared norm.
    pub fn bregman_points(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let yd = self.dual_image(y)?;
        self.bregman(x, &yd)
    }

    /// `B(x, y*) + B(y, z*) − B(x, z*) − ⟨z* − y*, x − y⟩` with
    /// `y* = dual_image(y)`; zero up to rounding.
    pub fn cosine_residual(&self, x: &[f64], y: &[f64], z_dual: &[f64]) -> Result<f64> {
        let y_dual = self.dual_image(y)?;
        let lhs = self.bregman(x, &y_dual)? + self.bregman(y, z_dual)? - self.bregman(x, z_dual)?;
        let rhs = dot(&sub(z_dual, &y_dual), &sub(x, y));
        Ok(lhs - rhs)
    }

    /// The point `X` with `d ∈ ∂[(ψ − a^ψ)/η](X)`, i.e. `mirror_step(a^ψ + η d)`.
    pub fn resolve_intermediate(&self, d: &[f64], eta: f64) -> Result<Vec<f64>> {
        check_dim(self.dim(), d.len())?;
        if !(eta > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("eta must be > 0, got {eta}")));
        }
        let p: Vec<f64> = self.anchor_dual.iter().zip(d).map(|(a, di)| a + eta * di).collect();
        self.mirror_step(&p)
    }

    /// `‖x − y‖` in the map's primal norm.
    pub fn primal_dist(&self, x: &[f64], y: &[f64]) -> f64 {
        self.norms.primal(&sub(x, y))
    }

    /// `‖g − h‖` in the map's dual norm.
    pub fn dual_dist(&self, g: &[f64], h: &[f64]) -> f64 {
        self.norms.dual(&sub(g, h))
    }

    /// Euclidean norm helper exposed for evaluators of the Hilbert bounds.
    pub fn euclid(&self, v: &[f64]) -> f64 {
        norm2(v)
    }
}
