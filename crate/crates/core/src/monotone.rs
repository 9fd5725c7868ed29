//! Monotone operators, oriented segment integrals and the polyline regret
//! `Regretⁿ`.
//!
//! For monotone `M` the integrand `m(s) = ⟨M(x + s(y − x)), y − x⟩` is
//! non-decreasing, so left and right Riemann sums bracket the integral.
//! Inequalities are certified with the bracket, never the trapezoid value.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, sub, Matrix};
use crate::sets::FeasibleSet;

/// Default quadrature resolution per segment.
pub const DEFAULT_QUADRATURE: usize = 1024;

/// Single-valued selection of a monotone operator `M: ℝⁿ → ℝⁿ`.
#[derive(Debug, Clone)]
pub enum MonotoneOperator {
    /// `M(x) = Qx + b`, the gradient of `½xᵀQx + bᵀx` with `Q` symmetric PSD.
    GradientQuadratic { q: Matrix, b: Vec<f64> },
    /// `M(x) = Ax + b` with `A + Aᵀ ⪰ 0`.
    Linear { a: Matrix, b: Vec<f64> },
    /// Caller-supplied selection.
    Custom { dim: usize, name: &'static str, eval: fn(&[f64]) -> Vec<f64> },
}

impl MonotoneOperator {
    pub fn gradient_quadratic(q: Matrix, b: Vec<f64>) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::InvalidParameter("Q must be square".into()));
        }
        check_dim(q.rows(), b.len())?;
        let asym = q.add(&q.transpose().scaled(-1.0))?.frobenius();
        if asym > 1e-12 * (1.0 + q.frobenius()) {
            return Err(Error::InvalidParameter("Q must be symmetric".into()));
        }
        Ok(Self::GradientQuadratic { q, b })
    }

    pub fn linear(a: Matrix, b: Vec<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::InvalidParameter("A must be square".into()));
        }
        check_dim(a.rows(), b.len())?;
        Ok(Self::Linear { a, b })
    }

    /// The rotation `A = [[0, 1], [−1, 0]]`: monotone, not conservative.
    pub fn skew() -> Self {
        Self::Linear {
            a: Matrix::from_rows(&[alloc::vec![0.0, 1.0], alloc::vec![-1.0, 0.0]]).unwrap(),
            b: alloc::vec![0.0, 0.0],
        }
    }

    /// Gradient of `½‖x‖²`.
    pub fn identity(dim: usize) -> Self {
        Self::GradientQuadratic { q: Matrix::identity(dim), b: alloc::vec![0.0; dim] }
    }

    /// `A = BᵀB/n + (C − Cᵀ)` with Gaussian `B`, `C`.
    pub fn random_linear(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = |_| -> f64 { rng.sample(StandardNormal) };
        let b = Matrix::new(dim, dim, (0..dim * dim).map(&mut g).collect()).unwrap();
        let c = Matrix::new(dim, dim, (0..dim * dim).map(&mut g).collect()).unwrap();
        let psd = b.transpose().matmul(&b).scaled(1.0 / dim as f64);
        let skew = c.add(&c.transpose().scaled(-1.0)).unwrap();
        let shift = (0..dim).map(&mut g).collect();
        Self::Linear { a: psd.add(&skew).unwrap(), b: shift }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::GradientQuadratic { b, .. } | Self::Linear { b, .. } => b.len(),
            Self::Custom { dim, .. } => *dim,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::GradientQuadratic { .. } => "gradient-quadratic",
            Self::Linear { .. } => "linear",
            Self::Custom { name, .. } => name,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Self::GradientQuadratic { q: m, b } | Self::Linear { a: m, b } => {
                let mut y = m.mul_vec(x);
                for (yi, bi) in y.iter_mut().zip(b) {
                    *yi += bi;
                }
                y
            }
            Self::Custom { eval, .. } => eval(x),
        }
    }

    /// `φ` with `∇φ = M`, when the descriptor guarantees one exists.
    pub fn potential(&self, x: &[f64]) -> Option<f64> {
        match self {
            Self::GradientQuadratic { q, b } => Some(0.5 * q.quad_form(x) + dot(b, x)),
            Self::Linear { a, b } if a.is_symmetric(1e-12) => Some(0.5 * a.quad_form(x) + dot(b, x)),
            _ => None,
        }
    }

    pub fn is_conservative(&self) -> bool {
        match self {
            Self::GradientQuadratic { .. } => true,
            Self::Linear { a, .. } => a.is_symmetric(1e-12),
            Self::Custom { .. } => false,
        }
    }

    /// Frobenius bound on the Lipschitz constant; `1` for custom operators,
    /// which carry no such information.
    pub fn lipschitz_bound(&self) -> f64 {
        match self {
            Self::GradientQuadratic { q, .. } => q.frobenius(),
            Self::Linear { a, .. } => a.frobenius(),
            Self::Custom { .. } => 1.0,
        }
    }
}

/// Trapezoid value with its left / right Riemann bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentIntegral {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl SegmentIntegral {
    const ZERO: Self = Self { value: 0.0, lower: 0.0, upper: 0.0 };

    fn add(self, o: Self) -> Self {
        Self { value: self.value + o.value, lower: self.lower + o.lower, upper: self.upper + o.upper }
    }
}

/// `∫₀¹ ⟨M(x + s(y − x)), y − x⟩ ds` with `k` subintervals.
pub fn segment_integral(m: &MonotoneOperator, x: &[f64], y: &[f64], k: usize) -> Result<SegmentIntegral> {
    if k == 0 {
        return Err(Error::InvalidParameter("quadrature needs k ≥ 1".into()));
    }
    check_dim(m.dim(), x.len())?;
    check_dim(m.dim(), y.len())?;
    if x == y {
        return Ok(SegmentIntegral::ZERO);
    }
    let d = sub(y, x);
    let h = 1.0 / k as f64;
    let mut p = x.to_vec();
    let mut first = 0.0;
    let mut last = 0.0;
    let mut inner = 0.0;
    for i in 0..=k {
        let s = i as f64 * h;
        for ((pi, xi), di) in p.iter_mut().zip(x).zip(&d) {
            *pi = xi + s * di;
        }
        let v = dot(&m.eval(&p), &d);
        if i == 0 {
            first = v;
        } else if i == k {
            last = v;
        } else {
            inner += v;
        }
    }
    let left = h * (first + inner);
    let right = h * (inner + last);
    Ok(SegmentIntegral {
        value: 0.5 * (left + right),
        lower: left.min(right),
        upper: left.max(right),
    })
}

/// Integral along the polyline through `vertices`.
pub fn path_integral(m: &MonotoneOperator, vertices: &[Vec<f64>], k: usize) -> Result<SegmentIntegral> {
    let mut acc = SegmentIntegral::ZERO;
    for w in vertices.windows(2) {
        acc = acc.add(segment_integral(m, &w[0], &w[1], k)?);
    }
    Ok(acc)
}

/// Circulation along a closed polyline; zero for conservative operators.
pub fn loop_integral(m: &MonotoneOperator, vertices: &[Vec<f64>], k: usize) -> Result<f64> {
    if vertices.len() < 2 || vertices.first() != vertices.last() {
        return Err(Error::InvalidParameter("loop must end where it starts".into()));
    }
    Ok(path_integral(m, vertices, k)?.value)
}

/// Largest of `Σ ⟨M(xᵢ), x_{i+1} − xᵢ⟩` over the given cyclic order and its
/// reverse. Non-positive for cyclically monotone operators.
pub fn cyclic_monotonicity_check(m: &MonotoneOperator, points: &[Vec<f64>]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter("a cycle needs at least two points".into()));
    }
    let cycle_sum = |order: &[&Vec<f64>]| -> Result<f64> {
        let n = order.len();
        let mut s = 0.0;
        for i in 0..n {
            let (x, y) = (order[i], order[(i + 1) % n]);
            check_dim(m.dim(), x.len())?;
            s += dot(&m.eval(x), &sub(y, x));
        }
        Ok(s)
    };
    let mut order: Vec<&Vec<f64>> = points.iter().collect();
    if order.len() > 2 && order.first() == order.last() {
        order.pop();
    }
    let forward = cycle_sum(&order)?;
    order.reverse();
    Ok(forward.max(cycle_sum(&order)?))
}

/// `min ⟨M(x) − M(y), x − y⟩` over `pairs` sampled pairs of `set`.
pub fn sampled_monotonicity(m: &MonotoneOperator, set: &FeasibleSet, pairs: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..pairs)
        .map(|_| {
            let x = set.sample_with(&mut rng);
            let y = set.sample_with(&mut rng);
            dot(&sub(&m.eval(&x), &m.eval(&y)), &sub(&x, &y))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Search settings for [`regret_n_estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretSearch {
    /// Number of free intermediate vertices.
    pub n: usize,
    /// Path evaluations allowed per level.
    pub budget: usize,
    pub seed: u64,
    /// Quadrature resolution per segment.
    pub k: usize,
    /// Random restarts per level, on top of the two structured starts.
    pub restarts: usize,
}

impl RegretSearch {
    pub fn new(n: usize, budget: usize, seed: u64) -> Self {
        Self { n, budget, seed, k: DEFAULT_QUADRATURE, restarts: 2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretEstimate {
    pub n: usize,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub budget_used: usize,
    /// `z, α₁, …, α_n, x`
    pub vertices: Vec<Vec<f64>>,
}

/// Upper estimate of `inf ∫_{γ_n(z, x)} ⟨M α, dα⟩` over polylines with `n`
/// intermediate vertices in `set`.
///
/// Level `n` starts from the best level `n − 1` path with a duplicated vertex
/// (so the estimate never increases with `n`), the evenly spaced collinear
/// path and seeded random restarts. Each start is refined by projected
/// coordinate descent with step halving.
pub fn regret_n_estimate(
    m: &MonotoneOperator,
    z: &[f64],
    x: &[f64],
    set: &FeasibleSet,
    search: RegretSearch,
) -> Result<RegretEstimate> {
    if search.budget == 0 {
        return Err(Error::BudgetExhausted);
    }
    check_dim(m.dim(), z.len())?;
    check_dim(m.dim(), x.len())?;
    check_dim(set.dim(), z.len())?;
    let k = search.k;
    if search.n == 0 {
        let s = segment_integral(m, z, x, k)?;
        return Ok(RegretEstimate {
            n: 0,
            value: s.value,
            lower: s.lower,
            upper: s.upper,
            budget_used: 1,
            vertices: alloc::vec![z.to_vec(), x.to_vec()],
        });
    }
    let prev = regret_n_estimate(m, z, x, set, RegretSearch { n: search.n - 1, ..search })?;
    let n = search.n;
    let mut used = prev.budget_used;
    let mut remaining = search.budget;
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));

    let mut starts: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut dup = prev.vertices.clone();
    let last_free = dup[dup.len() - 2].clone();
    dup.insert(dup.len() - 1, last_free);
    starts.push(dup[1..=n].to_vec());
    starts.push(
        (1..=n)
            .map(|i| {
                let s = i as f64 / (n + 1) as f64;
                z.iter().zip(x).map(|(a, b)| a + s * (b - a)).collect()
            })
            .collect(),
    );
    for _ in 0..search.restarts {
        starts.push((0..n).map(|_| set.sample_with(&mut rng)).collect());
    }

    let assemble = |free: &[Vec<f64>]| -> Vec<Vec<f64>> {
        let mut v = Vec::with_capacity(n + 2);
        v.push(z.to_vec());
        v.extend(free.iter().cloned());
        v.push(x.to_vec());
        v
    };

    // The duplicated start reproduces the previous value exactly.
    let mut best = prev.clone();
    best.n = n;
    best.vertices = assemble(&starts[0]);

    let scale = set.diameter_in(crate::math::NormPair::L2L2);
    let per_start = (remaining / starts.len()).max(1);
    for start in starts {
        if remaining == 0 {
            break;
        }
        let mut cap = per_start.min(remaining);
        let mut free = start;
        let mut cur = path_integral(m, &assemble(&free), k)?;
        cap -= 1;
        remaining -= 1;
        used += 1;
        let mut step = 0.25 * scale;
        'descent: while step > 1e-9 * scale && cap > 0 {
            let mut improved = false;
            for i in 0..n {
                for j in 0..m.dim() {
                    for sign in [1.0, -1.0] {
                        if cap == 0 {
                            break 'descent;
                        }
                        let mut trial = free.clone();
                        trial[i][j] += sign * step;
                        trial[i] = set.project(&trial[i])?;
                        let v = path_integral(m, &assemble(&trial), k)?;
                        cap -= 1;
                        remaining -= 1;
                        used += 1;
                        if v.value < cur.value {
                            free = trial;
                            cur = v;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if cur.value < best.value {
            best = RegretEstimate {
                n,
                value: cur.value,
                lower: cur.lower,
                upper: cur.upper,
                budget_used: 0,
                vertices: assemble(&free),
            };
        }
    }
    best.budget_used = used;
    Ok(best)
}

/// Both sides of the one-level nesting inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaCheck {
    /// Trapezoid value of the path integral `z → e_j → x̄`.
    pub lhs: f64,
    /// Right Riemann bracket of the same integral.
    pub lhs_upper: f64,
    /// `⟨ℓ, w − 1_j⟩ + ⟨M(e_j), e_j − z⟩` with `ℓᵢ = ⟨M(x̄), eᵢ⟩`.
    pub rhs: f64,
}

impl MetaCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs_upper <= self.rhs + tol
    }
}

pub fn meta_decomposition_check(
    m: &MonotoneOperator,
    experts: &[Vec<f64>],
    weights: &[f64],
    j: usize,
    z: &[f64],
    k: usize,
) -> Result<MetaCheck> {
    check_dim(experts.len(), weights.len())?;
    if j >= experts.len() {
        return Err(Error::InvalidParameter(alloc::format!("expert index {j} out of range")));
    }
    let n = m.dim();
    check_dim(n, z.len())?;
    let mut xbar = alloc::vec![0.0; n];
    for (e, w) in experts.iter().zip(weights) {
        check_dim(n, e.len())?;
        for (xi, ei) in xbar.iter_mut().zip(e) {
            *xi += w * ei;
        }
    }
    let ej = &experts[j];
    let path = path_integral(m, &[z.to_vec(), ej.clone(), xbar.clone()], k)?;
    let mx = m.eval(&xbar);
    let meta: f64 = experts
        .iter()
        .zip(weights)
        .enumerate()
        .map(|(i, (e, w))| dot(&mx, e) * (w - if i == j { 1.0 } else { 0.0 }))
        .sum();
    let inner = dot(&m.eval(ej), &sub(ej, z));
    Ok(MetaCheck { lhs: path.value, lhs_upper: path.upper, rhs: meta + inner })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn square() -> FeasibleSet {
        FeasibleSet::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
    }

    fn unit_square_ccw() -> Vec<Vec<f64>> {
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![0.0, 0.0]]
    }

    fn convex_quadratic() -> MonotoneOperator {
        let q = Matrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        MonotoneOperator::gradient_quadratic(q, vec![0.3, -0.2]).unwrap()
    }

    #[test]
    fn segment_examples() {
        let id = MonotoneOperator::identity(2);
        for k in [1, 7, 64] {
            let s = segment_integral(&id, &[0.0, 0.0], &[1.0, 1.0], k).unwrap();
            assert!((s.value - 1.0).abs() < 1e-12);
            assert!(s.lower <= 1.0 + 1e-12 && 1.0 <= s.upper + 1e-12);
        }
        let s = segment_integral(&id, &[0.3, 0.4], &[0.3, 0.4], 10).unwrap();
        assert_eq!((s.value, s.lower, s.upper), (0.0, 0.0, 0.0));
        let skew = MonotoneOperator::skew();
        let s = segment_integral(&skew, &[0.1, 0.7], &[0.9, -0.3], 16).unwrap();
        assert!((s.upper - s.lower).abs() < 1e-12 && (s.value - s.lower).abs() < 1e-12);
        assert!(segment_integral(&id, &[0.0, 0.0], &[1.0, 1.0], 0).is_err());
    }

    #[test]
    fn loop_examples() {
        let skew = MonotoneOperator::skew();
        let ccw = unit_square_ccw();
        assert!((loop_integral(&skew, &ccw, 1000).unwrap() + 2.0).abs() < 1e-6);
        let mut cw = ccw.clone();
        cw.reverse();
        assert!((loop_integral(&skew, &cw, 1000).unwrap() - 2.0).abs() < 1e-6);
        assert!(loop_integral(&convex_quadratic(), &ccw, 1000).unwrap().abs() < 1e-8);
        assert!(loop_integral(&skew, &ccw[..4], 10).is_err());
    }

    #[test]
    fn cyclic_examples() {
        let skew = MonotoneOperator::skew();
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        assert!((cyclic_monotonicity_check(&skew, &tri).unwrap() - 1.0).abs() < 1e-12);
        let pts: Vec<Vec<f64>> = (0..6).map(|s| square().sample(s)).collect();
        assert!(cyclic_monotonicity_check(&convex_quadratic(), &pts).unwrap() <= 1e-9);
        assert!(cyclic_monotonicity_check(&skew, &pts[..2]).unwrap() <= 1e-9);
        assert!(cyclic_monotonicity_check(&skew, &pts[..1]).is_err());
    }

    #[test]
    fn bracket_width_shrinks_with_k() {
        let m = convex_quadratic();
        let (x, y) = ([0.1, 0.9], [0.8, 0.2]);
        let d = sub(&y, &x);
        let spread = dot(&m.eval(&y), &d) - dot(&m.eval(&x), &d);
        for k in [8, 16, 32, 64] {
            let s = segment_integral(&m, &x, &y, k).unwrap();
            assert!(s.upper - s.lower <= spread / k as f64 + 1e-12);
        }
    }

    #[test]
    fn regret_n_zero_is_segment() {
        let m = MonotoneOperator::skew();
        let (z, x) = ([0.2, 0.3], [0.9, 0.6]);
        let e = regret_n_estimate(&m, &z, &x, &square(), RegretSearch::new(0, 5, 1)).unwrap();
        let s = segment_integral(&m, &z, &x, DEFAULT_QUADRATURE).unwrap();
        assert_eq!(e.value, s.value);
        assert!(regret_n_estimate(&m, &z, &x, &square(), RegretSearch::new(1, 0, 1)).is_err());
    }

    #[test]
    fn regret_n_conservative_matches_potential() {
        let m = convex_quadratic();
        let (z, x) = ([0.1, 0.2], [0.7, 0.9]);
        let truth = m.potential(&x).unwrap() - m.potential(&z).unwrap();
        for n in 0..=2 {
            let mut search = RegretSearch::new(n, 200, 4);
            search.k = 32;
            let e = regret_n_estimate(&m, &z, &x, &square(), search).unwrap();
            assert!((e.value - truth).abs() < 1e-6, "n={n}: {} vs {truth}", e.value);
        }
    }

    #[test]
    fn skew_regret_decreases_and_matches_grid() {
        let m = MonotoneOperator::skew();
        let (z, x) = ([0.1, 0.8], [0.7, 0.2]);
        let mut s0 = RegretSearch::new(0, 400, 9);
        s0.k = 8;
        let e0 = regret_n_estimate(&m, &z, &x, &square(), s0).unwrap();
        let e1 = regret_n_estimate(&m, &z, &x, &square(), RegretSearch { n: 1, ..s0 }).unwrap();
        assert!(e1.value < e0.value - 1e-3);
        let mut grid = f64::INFINITY;
        for i in 0..=100 {
            for j in 0..=100 {
                let a = vec![i as f64 / 100.0, j as f64 / 100.0];
                let v = path_integral(&m, &[z.to_vec(), a, x.to_vec()], 8).unwrap().value;
                grid = grid.min(v);
            }
        }
        assert!(e1.value <= grid + 1e-6, "{} vs grid {grid}", e1.value);
    }

    #[test]
    fn meta_single_expert() {
        let m = convex_quadratic();
        let xbar = vec![0.4, 0.6];
        let c = meta_decomposition_check(&m, &[xbar.clone()], &[1.0], 0, &[0.9, 0.1], 256).unwrap();
        let truth = m.potential(&xbar).unwrap() - m.potential(&[0.9, 0.1]).unwrap();
        assert!((c.lhs - truth).abs() < 1e-9);
        assert!(c.holds(1e-12));
    }

    #[test]
    fn random_linear_is_monotone() {
        for seed in 0..20 {
            let m = MonotoneOperator::random_linear(3, seed);
            let set = FeasibleSet::unit_ball(3).unwrap();
            assert!(sampled_monotonicity(&m, &set, 200, seed) >= -1e-9);
            assert!(!m.is_conservative());
        }
    }
}
