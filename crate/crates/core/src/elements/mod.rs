//! Crouzeix–Raviart element, its quadratic enrichments, and the dual-basis
//! construction shared by all of them.
//!
//! An enrichment is described by three linear functionals `F_j`. Together
//! with the edge means `I_j` they form the degrees of freedom of a quadratic
//! element on `P₂(T)`. The triple is unisolvent exactly when the matrix
//! `N[j][i] = F_j(φ_i)` is nonsingular, where `φ_i, ϕ_i` is the vertex/edge
//! dual basis of the AF3 element (see [`af3_basis`]). In that case the dual
//! basis of the enriched element is
//!
//! ```text
//! ρ_i = ⟨w_i, φ⟩ + ϕ_i,   τ_i = ⟨c_i, φ⟩,
//! c_i = i-th column of N⁻¹,   w_i = -Σ_j c_j F_j(ϕ_i).
//! ```
//!
//! Every functional and basis function here is defined through barycentric
//! coordinates, so `N` and the dual-basis coefficients do not depend on the
//! triangle. An [`EnrichedElement`] is built once and applied on any triangle.

mod families;
mod matrix;
mod spec;

pub use families::{gn_basis, pn_basis, Family, FamilyConstants, GnConstants, PnConstants, GN_MIN_ABS_GAMMA};
pub use matrix::Matrix3;
pub use spec::{parse_functionals, ElementSpec};

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{Barycentric, Point2, Triangle};
use crate::quadrature::{self, DEFAULT_SEGMENT_ORDER};

/// Relative singularity threshold: admissible iff `|det N| > ADMISSIBILITY_TOL * s`, where
/// `s` is the larger of `max|N_ij|³` and `‖F_0‖‖F_1‖‖F_2‖` (total absolute stencil weights).
/// The second scale catches matrices that are zero up to rounding.
pub const ADMISSIBILITY_TOL: f64 = 1e-12;

/// A degree of freedom on `C(T)`. Indices are 0-based and wrap modulo 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    /// Mean of `f` over the edge opposite vertex `j`, from `v_{j+1}` to `v_{j+2}`.
    EdgeMean(usize),
    /// `f(v_j)`.
    VertexEval(usize),
    /// `∫₀¹ w_γ(t) f(t m_{j+1} + (1 - t) m_{j+2}) dt` along the midsegment parallel to edge `j`.
    Midsegment { j: usize, gamma: f64 },
    /// `∫₀¹ w_μ(t) f(t m_j + (1 - t) m★) dt` along the half-median from `m★` to `m_j`.
    Median { j: usize, mu: f64 },
}

impl Functional {
    pub fn index(&self) -> usize {
        match *self {
            Functional::EdgeMean(j) | Functional::VertexEval(j) => j,
            Functional::Midsegment { j, .. } | Functional::Median { j, .. } => j,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.index() > 2 {
            return Err(Error::domain(format!(
                "functional index {} outside 0..=2",
                self.index()
            )));
        }
        match *self {
            Functional::Midsegment { gamma: p, .. } | Functional::Median { mu: p, .. }
                if !(p > -1.0 && p.is_finite()) =>
            {
                Err(Error::domain(format!("weight exponent {p} must exceed -1")))
            }
            _ => Ok(()),
        }
    }

    /// Discretizes the functional as weighted barycentric sample points.
    ///
    /// Integral functionals use `order` Gauss points (Legendre for edge means,
    /// Jacobi with the functional's exponent otherwise).
    pub fn stencil(&self, order: usize) -> Result<Stencil> {
        self.validate()?;
        let segment = |rule: quadrature::SegmentRule, a: Barycentric, b: Barycentric| Stencil {
            points: rule.iter().map(|(t, w)| (a.lerp(b, t), w)).collect(),
        };
        Ok(match *self {
            Functional::VertexEval(j) => Stencil {
                points: vec![(Barycentric::vertex(j), 1.0)],
            },
            Functional::EdgeMean(j) => segment(
                quadrature::gauss_legendre_01(order)?,
                Barycentric::vertex(j + 1),
                Barycentric::vertex(j + 2),
            ),
            Functional::Midsegment { j, gamma } => segment(
                quadrature::gauss_jacobi_01(gamma, order)?,
                Barycentric::midpoint(j + 1),
                Barycentric::midpoint(j + 2),
            ),
            Functional::Median { j, mu } => segment(
                quadrature::gauss_jacobi_01(mu, order)?,
                Barycentric::midpoint(j),
                Barycentric::CENTROID,
            ),
        })
    }

    /// Applies the functional to a Cartesian field on `t`.
    pub fn apply(&self, t: &Triangle, f: impl Fn(Point2) -> f64, order: usize) -> Result<f64> {
        Ok(self.stencil(order)?.apply(t, f))
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Functional::EdgeMean(j) => write!(f, "edge mean {j}"),
            Functional::VertexEval(j) => write!(f, "vertex {j}"),
            Functional::Midsegment { j, gamma } => write!(f, "midsegment {j} (gamma={gamma})"),
            Functional::Median { j, mu } => write!(f, "median {j} (mu={mu})"),
        }
    }
}

/// A functional discretized as `Σ w_k f(b_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    points: Vec<(Barycentric, f64)>,
}

impl Stencil {
    pub fn points(&self) -> &[(Barycentric, f64)] {
        &self.points
    }

    /// Total absolute weight; the norm of the functional on continuous functions.
    pub fn mass(&self) -> f64 {
        self.points.iter().map(|(_, w)| w.abs()).sum()
    }

    pub fn apply_bary(&self, f: impl Fn(&Barycentric) -> f64) -> f64 {
        self.points.iter().map(|(b, w)| w * f(b)).sum()
    }

    pub fn apply(&self, t: &Triangle, f: impl Fn(Point2) -> f64) -> f64 {
        self.apply_bary(|b| f(t.point_at(b)))
    }
}

/// Crouzeix–Raviart basis `1 - 2λ_i`.
pub fn cr_basis(b: &Barycentric) -> [f64; 3] {
    [1.0 - 2.0 * b[0], 1.0 - 2.0 * b[1], 1.0 - 2.0 * b[2]]
}

/// AF3 basis values at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Af3Eval {
    /// `φ_i = λ_i (1 - 3λ_{i+1} - 3λ_{i+2})`: one at `v_i`, zero at other vertices, zero edge means.
    pub phi: [f64; 3],
    /// `ϕ_i = 6 λ_{i+1} λ_{i+2}`: zero at vertices, edge means `δ_ij`.
    pub vphi: [f64; 3],
}

pub fn af3_basis(b: &Barycentric) -> Af3Eval {
    let phi = |i: usize| b[i] * (1.0 - 3.0 * b[i + 1] - 3.0 * b[i + 2]);
    let vphi = |i: usize| 6.0 * b[i + 1] * b[i + 2];
    Af3Eval {
        phi: [phi(0), phi(1), phi(2)],
        vphi: [vphi(0), vphi(1), vphi(2)],
    }
}

/// Dual-basis values `ρ_i, τ_i` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisEval {
    /// Dual to the edge means.
    pub rho: [f64; 3],
    /// Dual to the enriched functionals.
    pub tau: [f64; 3],
}

impl BasisEval {
    pub fn max_diff(&self, other: &BasisEval) -> f64 {
        self.rho
            .iter()
            .chain(&self.tau)
            .zip(other.rho.iter().chain(&other.tau))
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// `N[j][i] = F_j(φ_i)`.
pub fn build_n(enriched: &[Stencil; 3]) -> Matrix3 {
    let phi: Vec<Vec<[f64; 3]>> = enriched
        .iter()
        .map(|s| s.points.iter().map(|(b, _)| af3_basis(b).phi).collect())
        .collect();
    Matrix3::from_fn(|j, i| {
        enriched[j]
            .points
            .iter()
            .zip(&phi[j])
            .map(|((_, w), p)| w * p[i])
            .sum()
    })
}

/// `N` evaluated through a physical triangle, mapping each sample point to
/// Cartesian coordinates and back. Equal to [`build_n`] up to rounding.
pub fn build_n_on(enriched: &[Stencil; 3], t: &Triangle) -> Matrix3 {
    Matrix3::from_fn(|j, i| enriched[j].apply(t, |p| af3_basis(&t.barycentric(p)).phi[i]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissibility {
    pub det: f64,
    pub admissible: bool,
}

pub fn admissibility(n: &Matrix3, enriched: &[Stencil; 3]) -> Admissibility {
    let det = n.determinant();
    let norms: f64 = enriched.iter().map(Stencil::mass).product();
    let scale = n.max_abs().powi(3).max(norms);
    Admissibility {
        det,
        admissible: det.is_finite() && det.abs() > ADMISSIBILITY_TOL * scale,
    }
}

/// The quadratic element `(T, P₂, {I_j, F_j})` for an admissible triple `F_j`.
#[derive(Debug, Clone)]
pub struct EnrichedElement {
    label: String,
    functionals: [Functional; 3],
    edge_stencils: [Stencil; 3],
    enriched_stencils: [Stencil; 3],
    n: Matrix3,
    n_inv: Matrix3,
    det: f64,
    w: [[f64; 3]; 3],
    closed_form: Option<FamilyConstants>,
}

impl EnrichedElement {
    /// Builds the dual basis for an arbitrary triple of enriched functionals.
    pub fn new(label: impl Into<String>, functionals: [Functional; 3], order: usize) -> Result<Self> {
        let edge_stencils = [
            Functional::EdgeMean(0).stencil(order)?,
            Functional::EdgeMean(1).stencil(order)?,
            Functional::EdgeMean(2).stencil(order)?,
        ];
        let enriched_stencils = [
            functionals[0].stencil(order)?,
            functionals[1].stencil(order)?,
            functionals[2].stencil(order)?,
        ];
        let n = build_n(&enriched_stencils);
        let adm = admissibility(&n, &enriched_stencils);
        if !adm.admissible {
            return Err(Error::InadmissibleFunctionals { det: adm.det });
        }
        let n_inv = n
            .inverse_refined()
            .ok_or(Error::InadmissibleFunctionals { det: adm.det })?;

        // g[j][i] = F_j(ϕ_i)
        let g = Matrix3::from_fn(|j, i| enriched_stencils[j].apply_bary(|b| af3_basis(b).vphi[i]));
        // w_i = -N⁻¹ g_i, i.e. the i-th column of -N⁻¹ g
        let ng = n_inv * g;
        let w = [0, 1, 2].map(|i| ng.column(i).map(|v| -v));

        Ok(Self {
            label: label.into(),
            functionals,
            edge_stencils,
            enriched_stencils,
            n,
            n_inv,
            det: adm.det,
            w,
            closed_form: None,
        })
    }

    /// AF3: vertex evaluations as enriched functionals.
    pub fn af3() -> Result<Self> {
        Self::new(
            "af3",
            [0, 1, 2].map(Functional::VertexEval),
            DEFAULT_SEGMENT_ORDER,
        )
    }

    /// `GN_γ`: weighted integrals along the midsegments.
    pub fn gn(gamma: f64) -> Result<Self> {
        Self::gn_with_order(gamma, DEFAULT_SEGMENT_ORDER)
    }

    pub fn gn_with_order(gamma: f64, order: usize) -> Result<Self> {
        let constants = GnConstants::new(gamma)?;
        let mut e = Self::new(
            format!("gn:{gamma}"),
            [0, 1, 2].map(|j| Functional::Midsegment { j, gamma }),
            order,
        )?;
        e.closed_form = Some(FamilyConstants::Gn(constants));
        Ok(e)
    }

    /// `PN_μ`: weighted integrals along the half-medians.
    pub fn pn(mu: f64) -> Result<Self> {
        Self::pn_with_order(mu, DEFAULT_SEGMENT_ORDER)
    }

    pub fn pn_with_order(mu: f64, order: usize) -> Result<Self> {
        let constants = PnConstants::new(mu)?;
        let mut e = Self::new(
            format!("pn:{mu}"),
            [0, 1, 2].map(|j| Functional::Median { j, mu }),
            order,
        )?;
        e.closed_form = Some(FamilyConstants::Pn(constants));
        Ok(e)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn functionals(&self) -> &[Functional; 3] {
        &self.functionals
    }

    pub fn edge_stencils(&self) -> &[Stencil; 3] {
        &self.edge_stencils
    }

    pub fn enriched_stencils(&self) -> &[Stencil; 3] {
        &self.enriched_stencils
    }

    pub fn n(&self) -> &Matrix3 {
        &self.n
    }

    pub fn n_inv(&self) -> &Matrix3 {
        &self.n_inv
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    /// Column `i` of `N⁻¹`.
    pub fn c(&self, i: usize) -> [f64; 3] {
        self.n_inv.column(i)
    }

    pub fn w(&self, i: usize) -> [f64; 3] {
        self.w[i]
    }

    pub fn closed_form(&self) -> Option<&FamilyConstants> {
        self.closed_form.as_ref()
    }

    /// Dual basis from `N⁻¹` and `w_i`.
    pub fn generic_basis(&self, b: &Barycentric) -> BasisEval {
        let af3 = af3_basis(b);
        let dot = |v: &[f64; 3]| v[0] * af3.phi[0] + v[1] * af3.phi[1] + v[2] * af3.phi[2];
        BasisEval {
            rho: [0, 1, 2].map(|i| dot(&self.w[i]) + af3.vphi[i]),
            tau: [0, 1, 2].map(|i| dot(&self.c(i))),
        }
    }

    /// Dual basis, through the closed form when the element belongs to a known family.
    pub fn basis(&self, b: &Barycentric) -> BasisEval {
        match &self.closed_form {
            Some(FamilyConstants::Gn(c)) => gn_basis(c, b),
            Some(FamilyConstants::Pn(c)) => pn_basis(c, b),
            None => self.generic_basis(b),
        }
    }

    /// `(I_0, I_1, I_2, F_0, F_1, F_2)` applied to a Cartesian field on `t`.
    pub fn dofs(&self, t: &Triangle, f: impl Fn(Point2) -> f64) -> [f64; 6] {
        let mut out = [0.0; 6];
        for (slot, s) in out
            .iter_mut()
            .zip(self.edge_stencils.iter().chain(&self.enriched_stencils))
        {
            *slot = s.apply(t, &f);
        }
        out
    }

    /// Same as [`Self::dofs`] for a field given in barycentric coordinates.
    pub fn dofs_bary(&self, f: impl Fn(&Barycentric) -> f64) -> [f64; 6] {
        let mut out = [0.0; 6];
        for (slot, s) in out
            .iter_mut()
            .zip(self.edge_stencils.iter().chain(&self.enriched_stencils))
        {
            *slot = s.apply_bary(&f);
        }
        out
    }

    /// `Σ I_j ρ_j + Σ F_j τ_j` at `b`.
    pub fn evaluate(&self, dofs: &[f64; 6], b: &Barycentric) -> f64 {
        let e = self.basis(b);
        (0..3)
            .map(|j| dofs[j] * e.rho[j] + dofs[3 + j] * e.tau[j])
            .sum()
    }
}
