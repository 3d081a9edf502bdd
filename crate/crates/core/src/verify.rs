//! Self-check suite run by `cr-enrich check`.

use std::f64::consts::PI;
use std::fmt;

use crate::approximation::{
    convergence_order, global_interpolate, interpolation_property_check, l1_error, local_interpolate, Element,
};
use crate::elements::{ElementSpec, EnrichedElement, Matrix3};
use crate::error::Result;
use crate::geometry::{structured_mesh, Barycentric, Point2, Triangle};
use crate::quadrature::{beta, gauss_jacobi_01, gauss_legendre_01, sigma, triangle_rule};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

fn bound(name: &str, value: f64, tol: f64) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed: value <= tol,
        detail: format!("max deviation {value:.2e} (tolerance {tol:.0e})"),
    }
}

fn run(name: &str, body: impl FnOnce() -> Result<CheckResult>) -> CheckResult {
    body().unwrap_or_else(|e| CheckResult {
        name: name.into(),
        passed: false,
        detail: format!("error: {e}"),
    })
}

fn sample_triangles() -> Vec<Triangle> {
    let pts = [
        [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)],
        [(0.3, -0.2), (2.1, 0.4), (0.7, 1.9)],
        [(-1.0, -1.0), (4.0, -0.5), (-0.5, 0.2)],
        [(10.0, 10.0), (10.001, 10.0), (10.0, 10.002)],
    ];
    pts.iter()
        .map(|v| {
            let p = v.map(|(x, y)| Point2::new(x, y));
            Triangle::new(p[0], p[1], p[2]).expect("sample triangles are nondegenerate")
        })
        .collect()
}

fn grid(n: usize) -> Vec<Barycentric> {
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 0..=n - i {
            let (a, b) = (i as f64 / n as f64, j as f64 / n as f64);
            out.push(Barycentric([a, b, 1.0 - a - b]));
        }
    }
    out
}

fn check_beta() -> Result<CheckResult> {
    let cases = [
        (beta(0.5, 0.5)?, PI),
        (beta(2.0, 3.0)?, 1.0 / 12.0),
        (sigma(0.0)?, 1.0),
        (sigma(2.0)?, 1.0 / 30.0),
        (sigma(-0.5)?, PI),
    ];
    let worst = cases.iter().map(|(a, b)| ((a - b) / b).abs()).fold(0.0, f64::max);
    Ok(bound("beta and sigma", worst, 1e-12))
}

fn check_segment_rules() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let n = 10;
    let gl = gauss_legendre_01(n)?;
    for k in 0..2 * n {
        worst = worst.max((gl.integrate(|t| t.powi(k as i32)) - 1.0 / (k as f64 + 1.0)).abs());
    }
    for gamma in [-0.5, 0.5, 2.0, 5.0] {
        let rule = gauss_jacobi_01(gamma, n)?;
        for k in 0..2 * n {
            // ∫ t^k (t(1-t))^γ = B(k+γ+1, γ+1)
            let exact = beta(k as f64 + gamma + 1.0, gamma + 1.0)?;
            worst = worst.max(((rule.integrate(|t| t.powi(k as i32)) - exact) / exact).abs());
        }
    }
    Ok(bound("segment rule exactness", worst, 1e-12))
}

fn standard_elements() -> Result<Vec<Element>> {
    ["cr", "af3", "gn:2", "pn:2", "gn:-0.5", "pn:5"]
        .iter()
        .map(|s| Element::from_spec(&ElementSpec::parse(s, None)?))
        .collect()
}

fn check_duality() -> Result<CheckResult> {
    let f = |p: Point2| (p.x - 0.3 * p.y).sin() + p.x * p.y;
    let mut worst: f64 = 0.0;
    for element in standard_elements()? {
        for t in sample_triangles() {
            let scale = local_interpolate(f, &t, &element)?
                .coefficients()
                .iter()
                .fold(1.0f64, |m, v| m.max(v.abs()));
            let r = interpolation_property_check(f, &t, &element)?;
            worst = worst.max(r.iter().fold(0.0, |m: f64, v| m.max(*v)) / scale);
        }
    }
    Ok(bound("interpolation property", worst, 1e-9))
}

fn check_closed_forms() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for e in [EnrichedElement::gn(2.0)?, EnrichedElement::pn(2.0)?, EnrichedElement::gn(0.5)?] {
        let closed = e.closed_form().expect("family element has closed forms");
        let scale = closed.n_matrix().max_abs();
        worst = worst.max(e.n().max_diff(&closed.n_matrix()) / scale);
        worst = worst.max(e.n_inv().max_diff(&closed.n_inverse()) / e.n_inv().max_abs());
        worst = worst.max(((e.det() - closed.determinant()) / closed.determinant()).abs());
        for b in grid(12) {
            let d = e.basis(&b).max_diff(&e.generic_basis(&b));
            worst = worst.max(d / e.n_inv().max_abs());
        }
    }
    Ok(bound("closed forms vs generic construction", worst, 1e-10))
}

fn check_reproduction() -> Result<CheckResult> {
    let quad = |p: Point2| 1.0 + 2.0 * p.x - p.y + 0.5 * p.x * p.x - 1.5 * p.x * p.y + 3.0 * p.y * p.y;
    let lin = |p: Point2| 0.25 - p.x + 4.0 * p.y;
    let mut worst: f64 = 0.0;
    for element in standard_elements()? {
        let f: &dyn Fn(Point2) -> f64 = if element.degree() >= 2 { &quad } else { &lin };
        for t in sample_triangles() {
            let approx = local_interpolate(f, &t, &element)?;
            for b in grid(6) {
                let p = t.point_at(&b);
                worst = worst.max((approx.evaluate(&element, &b) - f(p)).abs() / (1.0 + f(p).abs()));
            }
        }
    }
    Ok(bound("polynomial reproduction", worst, 1e-10))
}

fn check_constants_and_inverse() -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for e in [EnrichedElement::gn(2.0)?, EnrichedElement::pn(2.0)?] {
        let ones = e.dofs_bary(|_| 1.0);
        for b in grid(8) {
            worst = worst.max((e.evaluate(&ones, &b) - 1.0).abs());
        }
        let inv: &Matrix3 = e.n_inv();
        let n = e.n();
        let prod = Matrix3::from_fn(|i, j| (0..3).map(|k| n.0[i][k] * inv.0[k][j]).sum());
        worst = worst.max(prod.max_diff(&Matrix3::IDENTITY));
    }
    Ok(bound("partition of unity and N N⁻¹ = I", worst, 1e-10))
}

fn check_convergence() -> Result<CheckResult> {
    let f = |p: Point2| (p.x + p.y).exp();
    let rule = triangle_rule(8)?;
    let meshes = [4, 8, 16].map(structured_mesh).into_iter().collect::<Result<Vec<_>>>()?;
    let mut detail = Vec::new();
    let mut passed = true;
    for (spec, lo, hi) in [("cr", 1.7, 2.3), ("gn:2", 2.6, 3.4)] {
        let element = Element::from_spec(&ElementSpec::parse(spec, None)?)?;
        let (mut errs, mut hs) = (Vec::new(), Vec::new());
        for mesh in &meshes {
            let field = global_interpolate(mesh, f, &element)?;
            let report = l1_error(&field, f, &rule);
            errs.push(report.l1);
            hs.push(report.h_max);
        }
        let order = *convergence_order(&errs, &hs)?.pairwise.last().expect("two levels");
        passed &= (lo..=hi).contains(&order);
        detail.push(format!("{spec} order {order:.2} (expected {lo}..{hi})"));
    }
    Ok(CheckResult {
        name: "convergence orders".into(),
        passed,
        detail: detail.join(", "),
    })
}

/// Runs every check; failures are reported, never raised.
pub fn run_checks() -> Vec<CheckResult> {
    vec![
        run("beta and sigma", check_beta),
        run("segment rule exactness", check_segment_rules),
        run("interpolation property", check_duality),
        run("closed forms vs generic construction", check_closed_forms),
        run("polynomial reproduction", check_reproduction),
        run("partition of unity and N N⁻¹ = I", check_constants_and_inverse),
        run("convergence orders", check_convergence),
    ]
}
