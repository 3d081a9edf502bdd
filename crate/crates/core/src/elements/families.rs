//! Closed forms for the two admissible families.
//!
//! `GN_γ` enriches with `w_γ`-weighted integrals along the three midsegments,
//! `PN_μ` with `w_μ`-weighted integrals along the half-medians from the
//! barycenter to the edge midpoints. Both give a matrix `N` of the form
//! `a I + b (J - I)`, so the inverse, determinant and dual basis are explicit.

use super::{af3_basis, BasisEval, Matrix3};
use crate::error::{Error, Result};
use crate::geometry::Barycentric;
use crate::quadrature::sigma;

/// `GN_γ` is rejected for `|γ| <` this value: `c_γ` and `d_γ` grow like `1/γ`.
pub const GN_MIN_ABS_GAMMA: f64 = 1e-6;

/// Sum of the other two entries.
fn others(v: &[f64; 3], i: usize) -> f64 {
    v[(i + 1) % 3] + v[(i + 2) % 3]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnConstants {
    pub gamma: f64,
    pub sigma: f64,
    pub k: f64,
    pub c: f64,
    pub d: f64,
    pub delta: f64,
}

impl GnConstants {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > -1.0 && gamma.is_finite()) {
            return Err(Error::domain(format!("GN needs gamma > -1, got {gamma}")));
        }
        let g = gamma;
        if g.abs() < GN_MIN_ABS_GAMMA {
            let det = -g * g * (7.0 * g + 9.0) * sigma(g)?.powi(3) / (256.0 * (2.0 * g + 3.0).powi(3));
            return Err(Error::InadmissibleFunctionals { det });
        }
        let denom = g * (7.0 * g + 9.0);
        Ok(Self {
            gamma,
            sigma: sigma(g)?,
            k: -(5.0 * g + 6.0) / (8.0 * (2.0 * g + 3.0)),
            c: 3.0 * (11.0 * g * g + 33.0 * g + 24.0) / denom,
            d: -3.0 * (g + 3.0) * (3.0 * g + 4.0) / denom,
            delta: denom / (8.0 * (2.0 * g + 3.0).powi(2)),
        })
    }

    /// `F_{j,γ}(φ_j)`.
    pub fn f_phi_same(&self) -> f64 {
        -self.sigma / 4.0
    }

    /// `F_{j,γ}(φ_i)`, `i ≠ j`.
    pub fn f_phi_other(&self) -> f64 {
        self.sigma * self.k
    }

    /// `F_{j,γ}(ϕ_j)`.
    pub fn f_vphi_same(&self) -> f64 {
        3.0 * (self.gamma + 1.0) / (4.0 * (2.0 * self.gamma + 3.0)) * self.sigma
    }

    /// `F_{j,γ}(ϕ_i)`, `i ≠ j`.
    pub fn f_vphi_other(&self) -> f64 {
        0.75 * self.sigma
    }

    pub fn n_matrix(&self) -> Matrix3 {
        Matrix3::circulant(-0.25, self.k).scaled(self.sigma)
    }

    pub fn n_inverse(&self) -> Matrix3 {
        Matrix3::circulant(1.0 - 4.0 * self.k, 4.0 * self.k).scaled(1.0 / (self.sigma * self.delta))
    }

    /// `det N = -γ²(7γ + 9) σ_γ³ / (256 (2γ + 3)³)`, negative for every admissible γ.
    pub fn determinant(&self) -> f64 {
        let g = self.gamma;
        -g * g * (7.0 * g + 9.0) * self.sigma.powi(3) / (256.0 * (2.0 * g + 3.0).powi(3))
    }
}

/// Closed-form `GN_γ` dual basis.
pub fn gn_basis(c: &GnConstants, b: &Barycentric) -> BasisEval {
    let af3 = af3_basis(b);
    let scale = 1.0 / (c.sigma * c.delta);
    BasisEval {
        rho: [0, 1, 2].map(|i| c.c * af3.phi[i] + c.d * others(&af3.phi, i) + af3.vphi[i]),
        tau: [0, 1, 2].map(|i| {
            scale * ((1.0 - 4.0 * c.k) * af3.phi[i] + 4.0 * c.k * others(&af3.phi, i))
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PnConstants {
    pub mu: f64,
    pub sigma: f64,
    /// `D_μ`
    pub d: f64,
    /// `H_μ`
    pub h: f64,
    pub r: f64,
    pub q: f64,
    pub omega: f64,
}

impl PnConstants {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu > -1.0 && mu.is_finite()) {
            return Err(Error::domain(format!("PN needs mu > -1, got {mu}")));
        }
        let m = mu;
        let denom = 3.0 * (m + 2.0) * (7.0 * m + 10.0);
        Ok(Self {
            mu,
            sigma: sigma(m)?,
            d: -(3.0 * m + 4.0) / (3.0 * (2.0 * m + 3.0)),
            h: -(15.0 * m + 22.0) / (12.0 * (2.0 * m + 3.0)),
            r: -(125.0 * m * m + 372.0 * m + 276.0) / denom,
            q: (85.0 * m * m + 264.0 * m + 204.0) / denom,
            omega: -(m + 2.0) * (7.0 * m + 10.0) / (8.0 * (2.0 * m + 3.0).powi(2)),
        })
    }

    /// `G_{j,μ}(φ_j)`.
    pub fn g_phi_same(&self) -> f64 {
        0.5 * self.sigma * self.d
    }

    /// `G_{j,μ}(φ_i)`, `i ≠ j`.
    pub fn g_phi_other(&self) -> f64 {
        0.5 * self.sigma * self.h
    }

    /// `G_{j,μ}(ϕ_j)`.
    pub fn g_vphi_same(&self) -> f64 {
        (25.0 * self.mu + 38.0) / (12.0 * (2.0 * self.mu + 3.0)) * self.sigma
    }

    /// `G_{j,μ}(ϕ_i)`, `i ≠ j`.
    pub fn g_vphi_other(&self) -> f64 {
        (5.0 * self.mu + 7.0) / (6.0 * (2.0 * self.mu + 3.0)) * self.sigma
    }

    pub fn n_matrix(&self) -> Matrix3 {
        Matrix3::circulant(self.d, self.h).scaled(0.5 * self.sigma)
    }

    pub fn n_inverse(&self) -> Matrix3 {
        Matrix3::circulant(self.d + self.h, -self.h).scaled(2.0 / (self.sigma * self.omega))
    }

    /// `det N = -(μ + 2)²(7μ + 10) σ_μ³ / (256 (2μ + 3)³)`.
    pub fn determinant(&self) -> f64 {
        let m = self.mu;
        -(m + 2.0).powi(2) * (7.0 * m + 10.0) * self.sigma.powi(3) / (256.0 * (2.0 * m + 3.0).powi(3))
    }
}

/// Closed-form `PN_μ` dual basis.
pub fn pn_basis(c: &PnConstants, b: &Barycentric) -> BasisEval {
    let af3 = af3_basis(b);
    let scale = 2.0 / (c.sigma * c.omega);
    BasisEval {
        rho: [0, 1, 2].map(|i| c.r * af3.phi[i] + c.q * others(&af3.phi, i) + af3.vphi[i]),
        tau: [0, 1, 2].map(|i| scale * ((c.d + c.h) * af3.phi[i] - c.h * others(&af3.phi, i))),
    }
}

/// Constants of either family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyConstants {
    Gn(GnConstants),
    Pn(PnConstants),
}

impl FamilyConstants {
    pub fn n_matrix(&self) -> Matrix3 {
        match self {
            FamilyConstants::Gn(c) => c.n_matrix(),
            FamilyConstants::Pn(c) => c.n_matrix(),
        }
    }

    pub fn n_inverse(&self) -> Matrix3 {
        match self {
            FamilyConstants::Gn(c) => c.n_inverse(),
            FamilyConstants::Pn(c) => c.n_inverse(),
        }
    }

    pub fn determinant(&self) -> f64 {
        match self {
            FamilyConstants::Gn(c) => c.determinant(),
            FamilyConstants::Pn(c) => c.determinant(),
        }
    }

    pub fn basis(&self, b: &Barycentric) -> BasisEval {
        match self {
            FamilyConstants::Gn(c) => gn_basis(c, b),
            FamilyConstants::Pn(c) => pn_basis(c, b),
        }
    }

    /// Named scalar constants, for reporting.
    pub fn named(&self) -> Vec<(&'static str, f64)> {
        match *self {
            FamilyConstants::Gn(c) => vec![
                ("gamma", c.gamma),
                ("sigma", c.sigma),
                ("K", c.k),
                ("c", c.c),
                ("d", c.d),
                ("Delta", c.delta),
            ],
            FamilyConstants::Pn(c) => vec![
                ("mu", c.mu),
                ("sigma", c.sigma),
                ("D", c.d),
                ("H", c.h),
                ("r", c.r),
                ("q", c.q),
                ("Omega", c.omega),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Gn,
    Pn,
}

impl FamilyConstants {
    /// Evaluates every scalar constant of `family` at `parameter`.
    pub fn new(family: Family, parameter: f64) -> Result<Self> {
        match family {
            Family::Gn => GnConstants::new(parameter).map(FamilyConstants::Gn),
            Family::Pn => PnConstants::new(parameter).map(FamilyConstants::Pn),
        }
    }
}
