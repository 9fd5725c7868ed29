//! Closed convex feasible sets with exact Euclidean projections.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dist2, norm1, norm2, sq, sub};
use crate::math::NormPair;

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    /// Euclidean ball.
    Ball { center: Vec<f64>, radius: f64 },
    /// Axis-aligned box `lower ≤ x ≤ upper`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// Probability simplex `{x ≥ 0, Σxᵢ = 1}` with `dim` coordinates.
    Simplex { dim: usize },
}

impl FeasibleSet {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidParameter("ball dimension must be positive".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("ball radius {radius}")));
        }
        Ok(Self::Ball { center, radius })
    }

    pub fn unit_ball(dim: usize) -> Result<Self> {
        Self::ball(alloc::vec![0.0; dim], 1.0)
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::InvalidParameter("box dimension must be positive".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u) || !l.is_finite() || !u.is_finite()) {
            return Err(Error::InvalidParameter("box needs finite lower < upper".into()));
        }
        Ok(Self::Box { lower, upper })
    }

    pub fn simplex(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter("simplex needs at least 2 coordinates".into()));
        }
        Ok(Self::Simplex { dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Ball { center, .. } => center.len(),
            Self::Box { lower, .. } => lower.len(),
            Self::Simplex { dim } => *dim,
        }
    }

    /// Diameter in the set's native norm: `2r` for the ball, `‖u − l‖₂` for
    /// the box and `2` (in `ℓ1`) for the simplex.
    pub fn diameter(&self) -> f64 {
        match self {
            Self::Simplex { .. } => 2.0,
            _ => self.diameter_in(NormPair::L2L2),
        }
    }

    /// `sup_{x,y ∈ C} ‖x − y‖` for the primal norm of `norms`.
    pub fn diameter_in(&self, norms: NormPair) -> f64 {
        match (self, norms) {
            (Self::Ball { radius, .. }, NormPair::L2L2) => 2.0 * radius,
            (Self::Ball { center, radius }, NormPair::L1Linf) => {
                2.0 * radius * libm::sqrt(center.len() as f64)
            }
            (Self::Box { lower, upper }, NormPair::L2L2) => norm2(&sub(upper, lower)),
            (Self::Box { lower, upper }, NormPair::L1Linf) => norm1(&sub(upper, lower)),
            (Self::Simplex { .. }, NormPair::L2L2) => core::f64::consts::SQRT_2,
            (Self::Simplex { .. }, NormPair::L1Linf) => 2.0,
        }
    }

    /// Ball / box center, simplex barycenter.
    pub fn center(&self) -> Vec<f64> {
        match self {
            Self::Ball { center, .. } => center.clone(),
            Self::Box { lower, upper } => {
                lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect()
            }
            Self::Simplex { dim } => alloc::vec![1.0 / *dim as f64; *dim],
        }
    }

    /// Largest Euclidean norm of a point of the set.
    pub fn max_norm(&self) -> f64 {
        match self {
            Self::Ball { center, radius } => norm2(center) + radius,
            Self::Box { lower, upper } => libm::sqrt(
                lower
                    .iter()
                    .zip(upper)
                    .map(|(l, u)| sq(l.abs().max(u.abs())))
                    .sum(),
            ),
            Self::Simplex { .. } => 1.0,
        }
    }

    /// Euclidean projection `P_C(p)`.
    pub fn project(&self, p: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), p.len())?;
        Ok(match self {
            Self::Ball { center, radius } => {
                let d = sub(p, center);
                let n = norm2(&d);
                if n <= *radius {
                    p.to_vec()
                } else {
                    let s = radius / n;
                    center.iter().zip(&d).map(|(c, di)| c + s * di).collect()
                }
            }
            Self::Box { lower, upper } => p
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(x, (l, u))| x.clamp(*l, *u))
                .collect(),
            Self::Simplex { .. } => project_simplex(p),
        })
    }

    /// True iff `p` is within Euclidean distance `tol` of the set.
    pub fn membership(&self, p: &[f64], tol: f64) -> bool {
        if p.len() != self.dim() || p.iter().any(|x| !x.is_finite()) {
            return false;
        }
        match self.project(p) {
            Ok(q) => dist2(p, &q) <= tol,
            Err(_) => false,
        }
    }

    /// Deterministic pseudo-random point of the set.
    ///
    /// Simplex: normalized exponential spacings. Ball: Gaussian direction
    /// scaled by `r·U^{1/d}`. Box: coordinatewise uniform.
    pub fn sample(&self, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Self::Simplex { dim } => {
                let e: Vec<f64> = (0..*dim).map(|_| rng.sample::<f64, _>(Exp1)).collect();
                let s: f64 = e.iter().sum();
                e.into_iter().map(|x| x / s).collect()
            }
            Self::Ball { center, radius } => {
                let d = center.len();
                let mut dir: Vec<f64> =
                    (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let mut n = norm2(&dir);
                while n == 0.0 {
                    dir = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                    n = norm2(&dir);
                }
                let u: f64 = rng.random();
                let r = radius * libm::pow(u, 1.0 / d as f64);
                center.iter().zip(&dir).map(|(c, v)| c + r * v / n).collect()
            }
            Self::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| l + (u - l) * rng.random::<f64>())
                .collect(),
        }
    }
}

/// Sort-then-threshold projection onto the probability simplex.
///
/// Sorting is stable on descending values, so ties keep index order.
pub fn project_simplex(p: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p[b].total_cmp(&p[a]));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, &i) in order.iter().enumerate() {
        cumsum += p[i];
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if p[i] - t > 0.0 {
            tau = t;
        }
    }
    p.iter().map(|x| (x - tau).max(0.0)).collect()
}
