//! Local interpolation operators, piecewise fields over a mesh and error measurement.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::elements::{cr_basis, ElementSpec, EnrichedElement, Functional, Stencil};
use crate::error::{Error, Result};
use crate::geometry::{Barycentric, Mesh, Point2, Triangle};
use crate::quadrature::{TriangleRule, DEFAULT_SEGMENT_ORDER};
use crate::util::neumaier_sum;

/// The linear Crouzeix–Raviart element: edge means as degrees of freedom.
#[derive(Debug, Clone)]
pub struct CrElement {
    edge_stencils: [Stencil; 3],
}

impl CrElement {
    pub fn new(order: usize) -> Result<Self> {
        Ok(Self {
            edge_stencils: [
                Functional::EdgeMean(0).stencil(order)?,
                Functional::EdgeMean(1).stencil(order)?,
                Functional::EdgeMean(2).stencil(order)?,
            ],
        })
    }

    pub fn dofs(&self, t: &Triangle, f: impl Fn(Point2) -> f64) -> [f64; 3] {
        self.edge_stencils.each_ref().map(|s| s.apply(t, &f))
    }

    pub fn evaluate(&self, dofs: &[f64; 3], b: &Barycentric) -> f64 {
        let phi = cr_basis(b);
        dofs[0] * phi[0] + dofs[1] * phi[1] + dofs[2] * phi[2]
    }
}

/// Either the CR element or a quadratic enrichment of it.
#[derive(Debug, Clone)]
pub enum Element {
    Cr(CrElement),
    Enriched(EnrichedElement),
}

impl Element {
    pub fn from_spec(spec: &ElementSpec) -> Result<Self> {
        Self::from_spec_with_order(spec, DEFAULT_SEGMENT_ORDER)
    }

    /// Builds the element, integrating line functionals with `order` Gauss points.
    pub fn from_spec_with_order(spec: &ElementSpec, order: usize) -> Result<Self> {
        Ok(match spec {
            ElementSpec::Cr => Element::Cr(CrElement::new(order)?),
            ElementSpec::Af3 => Element::Enriched(EnrichedElement::af3()?),
            ElementSpec::Gn(g) => Element::Enriched(EnrichedElement::gn_with_order(*g, order)?),
            ElementSpec::Pn(m) => Element::Enriched(EnrichedElement::pn_with_order(*m, order)?),
            ElementSpec::Custom(f) => Element::Enriched(EnrichedElement::new("custom", *f, order)?),
        })
    }

    pub fn label(&self) -> &str {
        match self {
            Element::Cr(_) => "cr",
            Element::Enriched(e) => e.label(),
        }
    }

    /// Polynomial degree of the local space.
    pub fn degree(&self) -> usize {
        match self {
            Element::Cr(_) => 1,
            Element::Enriched(_) => 2,
        }
    }

    pub fn n_dofs(&self) -> usize {
        3 * self.degree()
    }
}

impl From<EnrichedElement> for Element {
    fn from(e: EnrichedElement) -> Self {
        Element::Enriched(e)
    }
}

/// Degree-of-freedom values of `f` on one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalApproximant {
    /// `(I_0, I_1, I_2)`.
    Cr([f64; 3]),
    /// `(I_0, I_1, I_2, F_0, F_1, F_2)`.
    Enriched([f64; 6]),
}

impl LocalApproximant {
    pub fn coefficients(&self) -> &[f64] {
        match self {
            LocalApproximant::Cr(c) => c,
            LocalApproximant::Enriched(c) => c,
        }
    }

    /// Value at `b`. Panics if `element` is not the kind the approximant was built with.
    pub fn evaluate(&self, element: &Element, b: &Barycentric) -> f64 {
        match (self, element) {
            (LocalApproximant::Cr(d), Element::Cr(e)) => e.evaluate(d, b),
            (LocalApproximant::Enriched(d), Element::Enriched(e)) => e.evaluate(d, b),
            _ => panic!("approximant does not match element `{}`", element.label()),
        }
    }
}

/// `Π f` on `t`: the DOF values of `f`.
pub fn local_interpolate(
    f: impl Fn(Point2) -> f64,
    t: &Triangle,
    element: &Element,
) -> Result<LocalApproximant> {
    let approx = match element {
        Element::Cr(e) => LocalApproximant::Cr(e.dofs(t, f)),
        Element::Enriched(e) => LocalApproximant::Enriched(e.dofs(t, f)),
    };
    if let Some(bad) = approx.coefficients().iter().find(|v| !v.is_finite()) {
        return Err(Error::domain(format!("non-finite degree of freedom {bad}")));
    }
    Ok(approx)
}

/// `|DOF(Π f) - DOF(f)|` for every degree of freedom of the element.
pub fn interpolation_property_check(
    f: impl Fn(Point2) -> f64,
    t: &Triangle,
    element: &Element,
) -> Result<Vec<f64>> {
    let approx = local_interpolate(&f, t, element)?;
    let pi_f = |p: Point2| approx.evaluate(element, &t.barycentric(p));
    let again: Vec<f64> = match element {
        Element::Cr(e) => e.dofs(t, pi_f).to_vec(),
        Element::Enriched(e) => e.dofs(t, pi_f).to_vec(),
    };
    Ok(approx
        .coefficients()
        .iter()
        .zip(&again)
        .map(|(a, b)| (a - b).abs())
        .collect())
}

/// A nonconforming global approximant: one local approximant per mesh triangle.
#[derive(Debug, Clone)]
pub struct PiecewiseField<'a> {
    mesh: &'a Mesh,
    element: &'a Element,
    local: Vec<LocalApproximant>,
}

impl<'a> PiecewiseField<'a> {
    pub fn mesh(&self) -> &'a Mesh {
        self.mesh
    }

    pub fn element(&self) -> &'a Element {
        self.element
    }

    pub fn local(&self) -> &[LocalApproximant] {
        &self.local
    }

    /// Value of the approximant on triangle `i` at `b`.
    pub fn evaluate_local(&self, i: usize, b: &Barycentric) -> f64 {
        self.local[i].evaluate(self.element, b)
    }

    /// Value at `p`, taken from the lowest-index triangle containing it.
    pub fn evaluate(&self, p: Point2) -> Result<f64> {
        let (i, b) = self.mesh.locate(p)?;
        Ok(self.evaluate_local(i, &b))
    }

    /// One line per triangle: index followed by its DOF values.
    pub fn write_text(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "# element {}", self.element.label())?;
        writeln!(w, "# triangles {}", self.local.len())?;
        for (i, a) in self.local.iter().enumerate() {
            write!(w, "{i}")?;
            for c in a.coefficients() {
                write!(w, " {c:e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("text output is UTF-8")
    }
}

/// Interpolates `f` independently on every triangle of `mesh`.
pub fn global_interpolate<'a>(
    mesh: &'a Mesh,
    f: impl Fn(Point2) -> f64 + Sync,
    element: &'a Element,
) -> Result<PiecewiseField<'a>> {
    let local = mesh
        .elements()
        .par_iter()
        .enumerate()
        .map(|(index, t)| {
            local_interpolate(&f, t, element).map_err(|e| Error::AtTriangle {
                index,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PiecewiseField {
        mesh,
        element,
        local,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// `∫_Ω |f - Π f|`, not normalized by the domain area.
    pub l1: f64,
    /// Largest deviation over the quadrature nodes; a sampled sup, not the true one.
    pub linf_sampled: f64,
    pub n_triangles: usize,
    pub h_max: f64,
    pub quad_degree: usize,
    pub subdivisions: u32,
}

impl fmt::Display for ErrorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "L1 = {:e}, sampled sup = {:e} ({} triangles, h_max = {:e}, degree {} rule",
            self.l1, self.linf_sampled, self.n_triangles, self.h_max, self.quad_degree
        )?;
        if self.subdivisions > 0 {
            write!(f, ", subdivided x{}", self.subdivisions)?;
        }
        f.write_str(")")
    }
}

/// L¹ and sampled L^∞ errors of `field` against `f`, using `rule` on every triangle.
///
/// Triangle contributions are computed in parallel and summed in triangle order,
/// so the result does not depend on the thread count.
pub fn l1_error(
    field: &PiecewiseField<'_>,
    f: impl Fn(Point2) -> f64 + Sync,
    rule: &TriangleRule,
) -> ErrorReport {
    let per_triangle: Vec<(f64, f64)> = field
        .mesh
        .elements()
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let mut sup: f64 = 0.0;
            let l1 = t.area()
                * neumaier_sum(rule.iter().map(|(b, w)| {
                    let d = (f(t.point_at(b)) - field.evaluate_local(i, b)).abs();
                    sup = sup.max(d);
                    w * d
                }));
            (l1, sup)
        })
        .collect();
    ErrorReport {
        l1: neumaier_sum(per_triangle.iter().map(|c| c.0)),
        linf_sampled: per_triangle.iter().map(|c| c.1).fold(0.0, f64::max),
        n_triangles: field.mesh.len(),
        h_max: field.mesh.h_max(),
        quad_degree: rule.degree(),
        subdivisions: rule.subdivisions(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Slopes {
    /// `log(e_i / e_{i+1}) / log(h_i / h_{i+1})` for consecutive levels.
    pub pairwise: Vec<f64>,
    /// Least-squares slope of `log e` against `log h`.
    pub least_squares: f64,
}

/// Observed convergence orders from errors on a refinement sequence.
pub fn convergence_order(errors: &[f64], h: &[f64]) -> Result<Slopes> {
    if errors.len() != h.len() {
        return Err(Error::domain(format!(
            "{} errors but {} mesh sizes",
            errors.len(),
            h.len()
        )));
    }
    if errors.len() < 2 {
        return Err(Error::domain("need at least two refinement levels"));
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::domain(format!("error {e} is not positive (exact)")));
    }
    if h.iter().any(|v| !(*v > 0.0 && v.is_finite())) || h.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::domain("mesh sizes must be positive and strictly decreasing"));
    }
    let pairwise = errors
        .windows(2)
        .zip(h.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    Ok(Slopes {
        pairwise,
        least_squares: sxy / sxx,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::geometry::structured_mesh;
    use crate::quadrature::{gauss_legendre_01, triangle_rule};

    fn enriched() -> Vec<Element> {
        ["af3", "gn:2", "pn:2"]
            .iter()
            .map(|s| Element::from_spec(&s.parse().unwrap()).unwrap())
            .collect()
    }

    fn cr() -> Element {
        Element::from_spec(&ElementSpec::Cr).unwrap()
    }

    fn random_triangle(rng: &mut impl Rng) -> Triangle {
        loop {
            let mut p = || Point2::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            if let Ok(t) = Triangle::new(p(), p(), p()) {
                if t.area() > 0.05 * t.longest_edge().powi(2) {
                    return t;
                }
            }
        }
    }

    fn random_bary(rng: &mut impl Rng) -> Barycentric {
        let (a, b): (f64, f64) = (rng.gen(), rng.gen());
        let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
        Barycentric::new(1.0 - a - b, a, b)
    }

    fn quadratic(a: [f64; 6]) -> impl Fn(Point2) -> f64 + Sync {
        move |p| a[0] + a[1] * p.x + a[2] * p.y + a[3] * p.x * p.x + a[4] * p.x * p.y + a[5] * p.y * p.y
    }

    fn f1(p: Point2) -> f64 {
        (p.x + p.y).exp()
    }

    #[test]
    fn constants_are_reproduced() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let t = random_triangle(&mut rng);
        for e in enriched().iter().chain(std::iter::once(&cr())) {
            let a = local_interpolate(|_| 2.5, &t, e).unwrap();
            for _ in 0..20 {
                assert_abs_diff_eq!(a.evaluate(e, &random_bary(&mut rng)), 2.5, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn quadratics_are_reproduced() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let elements = enriched();
        for _ in 0..50 {
            let t = random_triangle(&mut rng);
            let a: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let f = quadratic(a);
            for e in &elements {
                let approx = local_interpolate(&f, &t, e).unwrap();
                for _ in 0..10 {
                    let b = random_bary(&mut rng);
                    assert_abs_diff_eq!(approx.evaluate(e, &b), f(t.point_at(&b)), epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn cr_reproduces_linears_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let e = cr();
        for _ in 0..50 {
            let t = random_triangle(&mut rng);
            let a: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let f = |p: Point2| a[0] + a[1] * p.x + a[2] * p.y;
            let approx = local_interpolate(f, &t, &e).unwrap();
            let b = random_bary(&mut rng);
            assert_abs_diff_eq!(approx.evaluate(&e, &b), f(t.point_at(&b)), epsilon = 1e-11);
        }
        let t = Triangle::reference();
        let square = |p: Point2| t.barycentric(p)[0].powi(2);
        let approx = local_interpolate(square, &t, &e).unwrap();
        let b = Barycentric::vertex(0);
        assert!((approx.evaluate(&e, &b) - 1.0).abs() > 0.1);
    }

    #[test]
    fn interpolation_property() {
        let t = Triangle::new(Point2::new(0.1, 0.2), Point2::new(0.9, 0.3), Point2::new(0.4, 0.8)).unwrap();
        let gn = Element::from_spec(&ElementSpec::Gn(2.0)).unwrap();
        let r = interpolation_property_check(f1, &t, &gn).unwrap();
        assert_eq!(r.len(), 6);
        assert!(r.iter().all(|v| *v <= 1e-9), "{r:?}");
        let r = interpolation_property_check(quadratic([1.0, -2.0, 0.5, 3.0, -1.0, 2.0]), &t, &gn).unwrap();
        assert!(r.iter().all(|v| *v <= 1e-11), "{r:?}");
        let r = interpolation_property_check(f1, &t, &cr()).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|v| *v <= 1e-12), "{r:?}");
    }

    #[test]
    fn non_finite_values_are_reported() {
        let t = Triangle::reference();
        let err = local_interpolate(|p| 1.0 / p.x, &t, &cr()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let mesh = structured_mesh(2).unwrap();
        let element = cr();
        let err = global_interpolate(&mesh, |p| if p.x > 0.9 { f64::NAN } else { 0.0 }, &element)
            .unwrap_err();
        assert!(matches!(err, Error::AtTriangle { .. }));
    }

    #[test]
    fn global_field_reproduces_quadratic() {
        let mesh = structured_mesh(2).unwrap();
        let f = quadratic([0.3, 1.0, -0.7, 2.0, 0.5, -1.5]);
        let element = Element::from_spec(&ElementSpec::Gn(2.0)).unwrap();
        let field = global_interpolate(&mesh, &f, &element).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let p = Point2::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            assert_abs_diff_eq!(field.evaluate(p).unwrap(), f(p), epsilon = 1e-9);
        }
        let one = global_interpolate(&mesh, |_| 1.0, &element).unwrap();
        for _ in 0..50 {
            let p = Point2::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            assert_abs_diff_eq!(one.evaluate(p).unwrap(), 1.0, epsilon = 1e-12);
        }
        assert!(field.evaluate(Point2::new(1.5, 0.5)).is_err());
    }

    #[test]
    fn shared_edge_means_agree() {
        let mesh = structured_mesh(3).unwrap();
        let gl = gauss_legendre_01(12).unwrap();
        for element in enriched().iter().chain(std::iter::once(&cr())) {
            let field = global_interpolate(&mesh, |p| (3.0 * p.x).sin() * p.y.exp(), element).unwrap();
            let neighbors = mesh.edge_neighbors();
            for (ti, nb) in neighbors.iter().enumerate() {
                for j in 0..3 {
                    let Some(tk) = nb[j] else { continue };
                    let tri = mesh.triangle(ti);
                    let (a, b) = (tri.vertex(j + 1), tri.vertex(j + 2));
                    let mean_on = |k: usize| {
                        let t = mesh.triangle(k);
                        gl.integrate(|s| field.evaluate_local(k, &t.barycentric(a.lerp(b, s))))
                    };
                    assert_abs_diff_eq!(mean_on(ti), mean_on(tk), epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn l1_error_behaviour() {
        let rule = triangle_rule(8).unwrap();
        let m4 = structured_mesh(4).unwrap();
        let m8 = structured_mesh(8).unwrap();
        let gn = Element::from_spec(&ElementSpec::Gn(2.0)).unwrap();
        let f = quadratic([1.0, 0.5, -0.5, 2.0, 1.0, -1.0]);
        let field = global_interpolate(&m4, &f, &gn).unwrap();
        assert!(l1_error(&field, &f, &rule).l1 <= 1e-10);

        let ratio = |e: &Element| {
            let c = l1_error(&global_interpolate(&m4, f1, e).unwrap(), f1, &rule);
            let fine = l1_error(&global_interpolate(&m8, f1, e).unwrap(), f1, &rule);
            assert_eq!(c.n_triangles, 32);
            assert_eq!(fine.n_triangles, 128);
            assert!(c.linf_sampled > 0.0);
            c.l1 / fine.l1
        };
        let r_cr = ratio(&cr());
        let r_gn = ratio(&gn);
        assert!((3.5..4.5).contains(&r_cr), "{r_cr}");
        assert!((6.5..9.5).contains(&r_gn), "{r_gn}");
    }

    #[test]
    fn l1_error_is_deterministic_and_subdivision_agrees() {
        let mesh = structured_mesh(8).unwrap();
        let rule = triangle_rule(8).unwrap();
        let element = Element::from_spec(&ElementSpec::Pn(2.0)).unwrap();
        let field = global_interpolate(&mesh, f1, &element).unwrap();
        let a = l1_error(&field, f1, &rule);
        let b = l1_error(&field, f1, &rule);
        assert_eq!(a.l1.to_bits(), b.l1.to_bits());
        let fine = l1_error(&field, f1, &rule.subdivided());
        assert_eq!(fine.subdivisions, 1);
        // |f - Π f| has kinks inside triangles, so finer sampling shifts the value a little
        let finer = l1_error(&field, f1, &rule.subdivided().subdivided());
        assert!((finer.l1 - fine.l1).abs() < (fine.l1 - a.l1).abs());
        assert!((fine.l1 - a.l1).abs() <= 0.15 * a.l1);
        assert!(fine.to_string().contains("subdivided"));
    }

    #[test]
    fn synthetic_orders() {
        let s = convergence_order(&[1.0, 0.25], &[1.0, 0.5]).unwrap();
        assert_abs_diff_eq!(s.pairwise[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.least_squares, 2.0, epsilon = 1e-14);
        let s = convergence_order(&[1.0, 0.125], &[1.0, 0.5]).unwrap();
        assert_abs_diff_eq!(s.pairwise[0], 3.0, epsilon = 1e-14);
        let s = convergence_order(&[0.3, 0.3, 0.3], &[1.0, 0.5, 0.25]).unwrap();
        assert_abs_diff_eq!(s.least_squares, 0.0, epsilon = 1e-14);
        assert!(convergence_order(&[1.0, 0.0], &[1.0, 0.5]).is_err());
        assert!(convergence_order(&[1.0], &[1.0]).is_err());
        assert!(convergence_order(&[1.0, 0.5], &[0.5, 1.0]).is_err());
        assert!(convergence_order(&[1.0, 0.5], &[1.0]).is_err());
    }

    #[test]
    fn text_serialization() {
        let mesh = structured_mesh(1).unwrap();
        let element = Element::from_spec(&ElementSpec::Gn(2.0)).unwrap();
        let field = global_interpolate(&mesh, f1, &element).unwrap();
        let text = field.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# element gn:2");
        assert_eq!(lines.len(), 2 + mesh.len());
        let values: Vec<f64> = lines[2].split_whitespace().skip(1).map(|v| v.parse().unwrap()).collect();
        assert_eq!(values.as_slice(), field.local()[0].coefficients());
    }

    #[test]
    fn gn_zero_cannot_be_built() {
        assert!(Element::from_spec(&ElementSpec::Gn(0.0)).is_err());
        let custom = ElementSpec::parse("custom", Some("midseg:0")).unwrap();
        assert!(matches!(
            Element::from_spec(&custom),
            Err(Error::InadmissibleFunctionals { .. })
        ));
    }
}
