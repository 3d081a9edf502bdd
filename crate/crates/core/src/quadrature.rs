//! Beta function, Gauss rules on `[0, 1]` and symmetric triangle rules.
//!
//! The weighted rules integrate against `w_γ(t) = t^γ (1 - t)^γ`, whose total
//! mass is `σ_γ = B(γ + 1, γ + 1)`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geometry::{Barycentric, Triangle};

/// Number of nodes used for every line-integral functional.
pub const DEFAULT_SEGMENT_ORDER: usize = 20;
/// Exactness degree of the triangle rule used for L¹ errors.
pub const DEFAULT_TRIANGLE_DEGREE: usize = 8;
pub const MAX_SEGMENT_ORDER: usize = 64;

/// Euler beta function `B(a, b)` for `a, b > 0`.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain(format!(
            "beta({a}, {b}) needs positive finite arguments"
        )));
    }
    Ok(statrs::function::beta::ln_beta(a, b).exp())
}

/// `σ_γ = B(γ + 1, γ + 1)`, the integral of `w_γ` over `[0, 1]`.
pub fn sigma(gamma: f64) -> Result<f64> {
    check_exponent(gamma)?;
    beta(gamma + 1.0, gamma + 1.0)
}

fn check_exponent(gamma: f64) -> Result<()> {
    if gamma > -1.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("weight exponent {gamma} must exceed -1")))
    }
}

fn check_order(n: usize) -> Result<()> {
    if (1..=MAX_SEGMENT_ORDER).contains(&n) {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "segment rule order {n} outside 1..={MAX_SEGMENT_ORDER}"
        )))
    }
}

/// Gauss rule on `[0, 1]`, optionally absorbing the weight `w_γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    weight_exponent: Option<f64>,
}

impl SegmentRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Some(γ)` when the rule integrates against `w_γ`.
    pub fn weight_exponent(&self) -> Option<f64> {
        self.weight_exponent
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(t, w)| w * f(t)).sum()
    }
}

/// `n`-point Gauss–Legendre rule on `[0, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre_01(n: usize) -> Result<SegmentRule> {
    check_order(n)?;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for k in 0..n.div_ceil(2) {
        // Tricomi initial guess for the k-th largest root
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]; the rule is symmetric about 1/2
        nodes[n - 1 - k] = 0.5 * (1.0 + x);
        nodes[k] = 0.5 * (1.0 - x);
        weights[n - 1 - k] = 0.5 * w;
        weights[k] = 0.5 * w;
    }
    Ok(SegmentRule {
        nodes,
        weights,
        weight_exponent: None,
    })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// `n`-point Gauss rule for `∫₀¹ w_γ(t) f(t) dt`.
///
/// Built from the symmetric Jacobi (`α = β = γ`) three-term recurrence: the
/// nodes are the eigenvalues of the Jacobi matrix and the weights are
/// `σ_γ` times the squared first components of the normalized eigenvectors.
pub fn gauss_jacobi_01(gamma: f64, n: usize) -> Result<SegmentRule> {
    check_exponent(gamma)?;
    check_order(n)?;
    let mass = sigma(gamma)?;

    // off-diagonal entries b_k, k = 1..n-1, of the monic recurrence on [-1, 1]
    let off = |k: usize| -> f64 {
        let k = k as f64;
        if k == 1.0 {
            // closed form avoids 0/0 at γ = -1/2
            (1.0 / (2.0 * gamma + 3.0)).sqrt()
        } else {
            let s = 2.0 * k + 2.0 * gamma;
            (k * (k + 2.0 * gamma) / ((s + 1.0) * (s - 1.0))).sqrt()
        }
    };
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = off(k);
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);

    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = refine_root(eig.eigenvalues[i], n, &off);
            (0.5 * (1.0 + x), mass * christoffel(x, n, &off))
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // exact symmetry about t = 1/2
    for k in 0..n / 2 {
        let (lo, hi) = (pairs[k], pairs[n - 1 - k]);
        let t = 0.5 * (lo.0 + 1.0 - hi.0);
        let w = 0.5 * (lo.1 + hi.1);
        pairs[k] = (t, w);
        pairs[n - 1 - k] = (1.0 - t, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.5;
    }
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(SegmentRule {
        nodes,
        weights,
        weight_exponent: Some(gamma),
    })
}

/// Orthonormal polynomials `p_0..=p_n` of the recurrence with off-diagonals
/// `off(1..=n)`, with their derivatives, at `x`.
fn orthonormal(x: f64, n: usize, off: &impl Fn(usize) -> f64) -> (Vec<f64>, f64, f64) {
    let mut p = vec![0.0; n + 1];
    let (mut d_prev, mut d) = (0.0, 0.0);
    p[0] = 1.0;
    let mut b_prev = 0.0;
    for k in 1..=n {
        let b = off(k);
        let before = if k >= 2 { p[k - 2] } else { 0.0 };
        p[k] = (x * p[k - 1] - b_prev * before) / b;
        let d_next = (p[k - 1] + x * d - b_prev * d_prev) / b;
        d_prev = d;
        d = d_next;
        b_prev = b;
    }
    let pn = p[n];
    (p, pn, d)
}

/// Newton polish of an eigenvalue as a root of `p_n`.
fn refine_root(mut x: f64, n: usize, off: &impl Fn(usize) -> f64) -> f64 {
    for _ in 0..3 {
        let (_, pn, dn) = orthonormal(x, n, off);
        if dn == 0.0 || !dn.is_finite() {
            break;
        }
        let step = pn / dn;
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    x
}

/// Christoffel number `1 / Σ_{j<n} p_j(x)²` for the probability-normalized weight.
fn christoffel(x: f64, n: usize, off: &impl Fn(usize) -> f64) -> f64 {
    let (p, _, _) = orthonormal(x, n, off);
    1.0 / p[..n].iter().map(|v| v * v).sum::<f64>()
}

/// Symmetric rule on a triangle; weights sum to 1 and are scaled by the area on use.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule {
    nodes: Vec<Barycentric>,
    weights: Vec<f64>,
    degree: usize,
    subdivisions: u32,
}

impl TriangleRule {
    pub fn nodes(&self) -> &[Barycentric] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of times the rule has been split with [`Self::subdivided`].
    pub fn subdivisions(&self) -> u32 {
        self.subdivisions
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Barycentric, f64)> + '_ {
        self.nodes.iter().zip(self.weights.iter().copied())
    }

    /// `∫_T f`, with `f` given in barycentric coordinates.
    pub fn integrate_bary(&self, area: f64, f: impl Fn(&Barycentric) -> f64) -> f64 {
        area * self.iter().map(|(b, w)| w * f(b)).sum::<f64>()
    }

    /// `∫_T f` for `f` in Cartesian coordinates.
    pub fn integrate(&self, t: &Triangle, f: impl Fn(crate::Point2) -> f64) -> f64 {
        self.integrate_bary(t.area(), |b| f(t.point_at(b)))
    }

    /// The same rule applied on each of the four midpoint subtriangles.
    pub fn subdivided(&self) -> TriangleRule {
        let corners = [
            Barycentric::vertex(0),
            Barycentric::vertex(1),
            Barycentric::vertex(2),
        ];
        let mids = [
            Barycentric::midpoint(0),
            Barycentric::midpoint(1),
            Barycentric::midpoint(2),
        ];
        let children = [
            [corners[0], mids[2], mids[1]],
            [mids[2], corners[1], mids[0]],
            [mids[1], mids[0], corners[2]],
            [mids[0], mids[1], mids[2]],
        ];
        let mut nodes = Vec::with_capacity(4 * self.len());
        let mut weights = Vec::with_capacity(4 * self.len());
        for child in &children {
            for (b, w) in self.iter() {
                let mut l = [0.0; 3];
                for (corner, &coef) in child.iter().zip(b.0.iter()) {
                    for (li, ci) in l.iter_mut().zip(corner.0.iter()) {
                        *li += coef * ci;
                    }
                }
                nodes.push(Barycentric(l));
                weights.push(0.25 * w);
            }
        }
        TriangleRule {
            nodes,
            weights,
            degree: self.degree,
            subdivisions: self.subdivisions + 1,
        }
    }
}

enum Orbit {
    Centroid(f64),
    /// `(1 - 2a, a, a)` and its rotations.
    Three(f64, f64),
    /// all permutations of `(a, b, 1 - a - b)`.
    Six(f64, f64, f64),
}

fn expand(orbits: &[Orbit], degree: usize) -> TriangleRule {
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for orbit in orbits {
        match *orbit {
            Orbit::Centroid(w) => {
                nodes.push(Barycentric::CENTROID);
                weights.push(w);
            }
            Orbit::Three(a, w) => {
                let c = 1.0 - 2.0 * a;
                for l in [[c, a, a], [a, c, a], [a, a, c]] {
                    nodes.push(Barycentric(l));
                    weights.push(w);
                }
            }
            Orbit::Six(a, b, w) => {
                let c = 1.0 - a - b;
                for l in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                    nodes.push(Barycentric(l));
                    weights.push(w);
                }
            }
        }
    }
    TriangleRule {
        nodes,
        weights,
        degree,
        subdivisions: 0,
    }
}

/// Symmetric rule with positive weights exact to the requested degree (2, 5, 8 or 10).
#[allow(clippy::excessive_precision)]
pub fn triangle_rule(degree: usize) -> Result<TriangleRule> {
    use Orbit::*;
    let rule = match degree {
        2 => expand(&[Three(1.0 / 6.0, 1.0 / 3.0)], 2),
        5 => {
            let r = 15f64.sqrt();
            expand(
                &[
                    Centroid(9.0 / 40.0),
                    Three((6.0 - r) / 21.0, (155.0 - r) / 1200.0),
                    Three((6.0 + r) / 21.0, (155.0 + r) / 1200.0),
                ],
                5,
            )
        }
        // Dunavant's 16- and 25-point rules, refined by Newton on the moment equations
        8 => expand(
            &[
                Centroid(0.144_315_607_677_786_875_16),
                Three(0.459_292_588_292_723_014_16, 0.095_091_634_267_284_792_467),
                Three(0.170_569_307_751_760_120_89, 0.103_217_370_534_718_055_58),
                Three(0.050_547_228_317_030_953_093, 0.032_458_497_623_198_063_668),
                Six(
                    0.008_394_777_409_957_703_275_5,
                    0.263_112_829_634_638_227_83,
                    0.027_230_314_174_435_065_233,
                ),
            ],
            8,
        ),
        10 => expand(
            &[
                Centroid(0.090_817_990_382_761_333_931),
                Three(0.485_577_633_383_659_816_95, 0.036_725_957_756_463_358_618),
                Three(0.109_481_575_485_035_208_79, 0.045_321_059_435_526_866_65),
                Six(
                    0.141_707_219_414_873_004_57,
                    0.307_939_838_764_122_249_84,
                    0.072_757_916_845_423_139_298,
                ),
                Six(
                    0.025_003_534_762_684_698_094,
                    0.246_672_560_639_897_342_52,
                    0.028_327_242_531_055_827_956,
                ),
                Six(
                    0.009_540_815_400_299_642_714_1,
                    0.066_803_251_012_198_110_699,
                    0.009_421_666_963_732_364_635_2,
                ),
            ],
            10,
        ),
        d => return Err(Error::UnsupportedDegree(d)),
    };
    Ok(rule)
}
