//! Convergence studies: test functions, run configuration, CSV reports and gnuplot scripts.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use evalexpr::{Context, EvalexprError, EvalexprResult, Node, Value};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::approximation::{convergence_order, global_interpolate, l1_error, Element, Slopes};
use crate::elements::ElementSpec;
use crate::error::{Error, Result};
use crate::geometry::{read_mesh, structured_mesh, Mesh, Point2};
use crate::quadrature::{triangle_rule, DEFAULT_SEGMENT_ORDER, DEFAULT_TRIANGLE_DEGREE, MAX_SEGMENT_ORDER};

pub const BUILTIN_FUNCTIONS: [&str; 4] = ["f1", "f2", "f3", "f4"];
pub const DEFAULT_ELEMENTS: [&str; 3] = ["cr", "gn:2", "pn:2"];
pub const DEFAULT_LEVELS: [usize; 4] = [4, 8, 16, 32];
pub const CSV_HEADER: [&str; 6] = ["function", "element", "n_triangles", "h_max", "l1_error", "order"];

fn f1(p: Point2) -> f64 {
    (p.x + p.y).exp()
}

fn f2(p: Point2) -> f64 {
    1.0 / (p.x * p.x + p.y * p.y + 8.0)
}

fn f3(p: Point2) -> f64 {
    (p.x + p.y + 1.0).cos()
}

fn f4(p: Point2) -> f64 {
    (64.0 - 81.0 * ((p.x - 0.5).powi(2) + (p.y - 0.5).powi(2))).sqrt() / 9.0 - 0.5
}

#[derive(Clone)]
enum Evaluator {
    Builtin(fn(Point2) -> f64),
    Expression(Arc<Node>),
}

/// A scalar field on the unit square, either built in or parsed from an expression.
#[derive(Clone)]
pub struct TestFunction {
    name: String,
    evaluator: Evaluator,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction").field("name", &self.name).finish()
    }
}

/// Variables `x`, `y`, `pi` and unprefixed math functions for expressions.
struct PointContext {
    x: Value,
    y: Value,
    pi: Value,
}

impl Context for PointContext {
    fn get_value(&self, identifier: &str) -> Option<&Value> {
        match identifier {
            "x" => Some(&self.x),
            "y" => Some(&self.y),
            "pi" => Some(&self.pi),
            _ => None,
        }
    }

    fn call_function(&self, identifier: &str, argument: &Value) -> EvalexprResult<Value> {
        let f: fn(f64) -> f64 = match identifier {
            "exp" => f64::exp,
            "ln" | "log" => f64::ln,
            "sqrt" => f64::sqrt,
            "sin" => f64::sin,
            "cos" => f64::cos,
            "tan" => f64::tan,
            "abs" => f64::abs,
            _ => return Err(EvalexprError::FunctionIdentifierNotFound(identifier.to_string())),
        };
        Ok(Value::Float(f(argument.as_number()?)))
    }

    fn are_builtin_functions_disabled(&self) -> bool {
        false
    }

    fn set_builtin_functions_disabled(&mut self, _disabled: bool) -> EvalexprResult<()> {
        Err(EvalexprError::ContextNotMutable)
    }
}

fn eval_expression(node: &Node, p: Point2) -> EvalexprResult<f64> {
    let ctx = PointContext {
        x: Value::Float(p.x),
        y: Value::Float(p.y),
        pi: Value::Float(std::f64::consts::PI),
    };
    node.eval_number_with_context(&ctx)
}

impl TestFunction {
    /// A user-defined function of `x` and `y`, e.g. `sin(pi*x) * y^2`.
    ///
    /// Besides `x`, `y` and `pi`, expressions may call `exp`, `ln`, `sqrt`,
    /// `sin`, `cos`, `tan`, `abs` and every `math::*` builtin of `evalexpr`.
    pub fn expression(name: &str, formula: &str) -> Result<Self> {
        let bad = |msg: String| Error::Config(format!("expression `{name}`: {msg}"));
        if name.is_empty() || BUILTIN_FUNCTIONS.contains(&name) {
            return Err(bad("name must be non-empty and differ from f1..f4".into()));
        }
        let node = evalexpr::build_operator_tree(formula).map_err(|e| bad(e.to_string()))?;
        if let Some(v) = node
            .iter_variable_identifiers()
            .find(|v| !matches!(*v, "x" | "y" | "pi"))
        {
            return Err(bad(format!("unknown variable `{v}`")));
        }
        eval_expression(&node, Point2::new(0.5, 0.5)).map_err(|e| bad(e.to_string()))?;
        Ok(Self {
            name: name.to_string(),
            evaluator: Evaluator::Expression(Arc::new(node)),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Value at `p`; expressions that fail to evaluate give NaN.
    pub fn eval(&self, p: Point2) -> f64 {
        match &self.evaluator {
            Evaluator::Builtin(f) => f(p),
            Evaluator::Expression(node) => eval_expression(node, p).unwrap_or(f64::NAN),
        }
    }
}

/// One of the built-in functions `f1`..`f4`.
pub fn test_function(name: &str) -> Result<TestFunction> {
    let evaluator: fn(Point2) -> f64 = match name {
        "f1" => f1,
        "f2" => f2,
        "f3" => f3,
        "f4" => f4,
        _ => return Err(Error::UnknownFunction(name.to_string())),
    };
    Ok(TestFunction {
        name: name.to_string(),
        evaluator: Evaluator::Builtin(evaluator),
    })
}

/// Where the refinement sequence comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    /// `structured_mesh(n)` for each `n`.
    Structured(Vec<usize>),
    /// `.node`/`.ele` pairs, given by their common stem.
    Files(Vec<PathBuf>),
}

impl MeshSource {
    /// Parses `structured:4,8,16` or `files:a,b,c`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, list) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("mesh source `{s}` needs `structured:` or `files:`")))?;
        let items = list.split(',').map(str::trim).filter(|t| !t.is_empty());
        match kind.trim() {
            "structured" => items
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::Config(format!("invalid structured level `{t}`")))
                })
                .collect::<Result<_>>()
                .map(MeshSource::Structured),
            "files" => Ok(MeshSource::Files(items.map(PathBuf::from).collect())),
            other => Err(Error::Config(format!("unknown mesh source `{other}`"))),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            MeshSource::Structured(v) => v.len(),
            MeshSource::Files(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn load(&self) -> Result<Vec<Mesh>> {
        match self {
            MeshSource::Structured(levels) => levels.iter().map(|&n| structured_mesh(n)).collect(),
            MeshSource::Files(stems) => stems.iter().map(read_mesh).collect(),
        }
    }
}

impl fmt::Display for MeshSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshSource::Structured(v) => {
                let list: Vec<String> = v.iter().map(usize::to_string).collect();
                write!(f, "structured:{}", list.join(","))
            }
            MeshSource::Files(v) => {
                let list: Vec<String> = v.iter().map(|p| p.display().to_string()).collect();
                write!(f, "files:{}", list.join(","))
            }
        }
    }
}

/// Settings of a convergence run. Keys of [`RunConfig::set`] mirror the CLI flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub functions: Vec<String>,
    /// User functions as `(name, formula)`.
    pub expressions: Vec<(String, String)>,
    pub elements: Vec<String>,
    /// Functional description used by the element `custom`.
    pub custom: Option<String>,
    pub mesh: MeshSource,
    pub quad_degree: usize,
    pub subdivide: bool,
    pub segment_order: usize,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            functions: BUILTIN_FUNCTIONS.iter().map(|s| s.to_string()).collect(),
            expressions: Vec::new(),
            elements: DEFAULT_ELEMENTS.iter().map(|s| s.to_string()).collect(),
            custom: None,
            mesh: MeshSource::Structured(DEFAULT_LEVELS.to_vec()),
            quad_degree: DEFAULT_TRIANGLE_DEGREE,
            subdivide: false,
            segment_order: DEFAULT_SEGMENT_ORDER,
            out: None,
            plot: None,
        }
    }
}

fn split_list(v: &str) -> Vec<String> {
    v.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "" | "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!("`{key}` expects a boolean, got `{v}`"))),
    }
}

impl RunConfig {
    /// Sets one option. Keys: `functions`, `elements`, `mesh`, `quad-degree`,
    /// `subdivide`, `segment-order`, `custom`, `out`, `plot` and `expr.<name>`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let number = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::Config(format!("`{key}` expects an integer, got `{v}`")))
        };
        match key.as_str() {
            "functions" => self.functions = split_list(value),
            "elements" => self.elements = split_list(value),
            "mesh" => self.mesh = MeshSource::parse(value)?,
            "quad-degree" => self.quad_degree = number(value)?,
            "subdivide" => self.subdivide = parse_bool(&key, value)?,
            "segment-order" => self.segment_order = number(value)?,
            "custom" => self.custom = Some(value.to_string()),
            "out" => self.out = Some(PathBuf::from(value)),
            "plot" => self.plot = Some(PathBuf::from(value)),
            k => match k.strip_prefix("expr.") {
                Some(name) => {
                    self.expressions.retain(|(n, _)| n != name);
                    self.expressions.push((name.to_string(), value.to_string()));
                }
                None => return Err(Error::Config(format!("unknown key `{k}`"))),
            },
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of the defaults; `#` starts a comment.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut config = Self::default();
        config.apply_config_str(text)?;
        Ok(config)
    }

    pub fn apply_config_str(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            self.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_config_str(&text)
    }

    /// `key = value` lines that reproduce this configuration.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "functions = {}", self.functions.join(","));
        for (name, formula) in &self.expressions {
            let _ = writeln!(s, "expr.{name} = {formula}");
        }
        let _ = writeln!(s, "elements = {}", self.elements.join(","));
        if let Some(c) = &self.custom {
            let _ = writeln!(s, "custom = {c}");
        }
        let _ = writeln!(s, "mesh = {}", self.mesh);
        let _ = writeln!(s, "quad-degree = {}", self.quad_degree);
        let _ = writeln!(s, "subdivide = {}", self.subdivide);
        let _ = writeln!(s, "segment-order = {}", self.segment_order);
        if let Some(p) = &self.out {
            let _ = writeln!(s, "out = {}", p.display());
        }
        if let Some(p) = &self.plot {
            let _ = writeln!(s, "plot = {}", p.display());
        }
        s
    }

    /// SHA-256 of the settings that affect numeric results.
    pub fn hash(&self) -> String {
        let mut numeric = self.clone();
        numeric.out = None;
        numeric.plot = None;
        Sha256::digest(numeric.to_config_string().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Resolves names and checks ranges; element admissibility is left to the run.
    pub fn validate(&self) -> Result<(Vec<TestFunction>, Vec<ElementSpec>)> {
        if self.functions.is_empty() {
            return Err(Error::Config("no test functions given".into()));
        }
        if self.elements.is_empty() {
            return Err(Error::Config("no elements given".into()));
        }
        if self.mesh.is_empty() {
            return Err(Error::Config("mesh list is empty".into()));
        }
        if let MeshSource::Structured(levels) = &self.mesh {
            if levels.contains(&0) {
                return Err(Error::Config("structured levels must be positive".into()));
            }
        }
        triangle_rule(self.quad_degree)?;
        if !(1..=MAX_SEGMENT_ORDER).contains(&self.segment_order) {
            return Err(Error::Config(format!(
                "segment order must be in 1..={MAX_SEGMENT_ORDER}"
            )));
        }
        let functions = self
            .functions
            .iter()
            .map(|name| match self.expressions.iter().find(|(n, _)| n == name) {
                Some((n, formula)) => TestFunction::expression(n, formula),
                None => test_function(name),
            })
            .collect::<Result<Vec<_>>>()?;
        let elements = self
            .elements
            .iter()
            .map(|e| ElementSpec::parse(e, self.custom.as_deref()))
            .collect::<Result<Vec<_>>>()?;
        Ok((functions, elements))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub function: String,
    pub element: String,
    pub n_triangles: usize,
    pub h_max: f64,
    pub l1_error: Option<f64>,
    /// Observed order against the next coarser level of the same series.
    pub order: Option<f64>,
    /// Error kind when the row could not be computed.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub quad_degree: usize,
    pub subdivided: bool,
    pub segment_order: usize,
    pub mesh: String,
    pub config_hash: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
    pub metadata: Metadata,
}

impl ConvergenceReport {
    /// Functions in row order, without repetitions.
    pub fn functions(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.function.as_str()) {
                out.push(&r.function);
            }
        }
        out
    }

    /// Elements in row order, without repetitions.
    pub fn elements(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.element.as_str()) {
                out.push(&r.element);
            }
        }
        out
    }

    pub fn series(&self, function: &str, element: &str) -> Vec<&ReportRow> {
        self.rows
            .iter()
            .filter(|r| r.function == function && r.element == element)
            .collect()
    }

    /// Pairwise and least-squares orders of one series, if all its rows succeeded.
    pub fn slopes(&self, function: &str, element: &str) -> Result<Slopes> {
        let series = self.series(function, element);
        let errors = series
            .iter()
            .map(|r| r.l1_error)
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::domain(format!("{function}/{element} has failed rows")))?;
        let h: Vec<f64> = series.iter().map(|r| r.h_max).collect();
        convergence_order(&errors, &h)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.failure.is_some())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.rows {
            let l1 = match (&r.l1_error, &r.failure) {
                (Some(e), _) => e.to_string(),
                (None, Some(kind)) => format!("error:{kind}"),
                (None, None) => String::new(),
            };
            w.write_record([
                r.function.clone(),
                r.element.clone(),
                r.n_triangles.to_string(),
                r.h_max.to_string(),
                l1,
                r.order.map(|o| o.to_string()).unwrap_or_default(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }
}

/// Reads rows back from [`ConvergenceReport::to_csv`] output.
pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::parse(1, format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::parse(line, e.to_string()))?;
        let number = |k: usize| -> Result<f64> {
            record[k]
                .parse::<f64>()
                .map_err(|_| Error::parse(line, format!("invalid {} `{}`", CSV_HEADER[k], &record[k])))
        };
        let optional = |k: usize| -> Result<Option<f64>> {
            if record[k].is_empty() {
                Ok(None)
            } else {
                number(k).map(Some)
            }
        };
        let (l1_error, failure) = match record[4].strip_prefix("error:") {
            Some(kind) => (None, Some(kind.to_string())),
            None => (optional(4)?, None),
        };
        rows.push(ReportRow {
            function: record[0].to_string(),
            element: record[1].to_string(),
            n_triangles: record[2]
                .parse()
                .map_err(|_| Error::parse(line, format!("invalid n_triangles `{}`", &record[2])))?,
            h_max: number(3)?,
            l1_error,
            order: optional(5)?,
            failure,
        });
    }
    Ok(rows)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn emit_csv(report: &ConvergenceReport, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &report.to_csv())
}

/// Gnuplot script with one log-log panel per function: L¹ error against the
/// number of triangles for every element, plus order-2 and order-3 guides.
pub fn plot_script(report: &ConvergenceReport, image: &str) -> Result<String> {
    let mut levels: Vec<usize> = report.rows.iter().map(|r| r.n_triangles).collect();
    levels.sort_unstable();
    levels.dedup();
    if levels.len() < 2 {
        return Err(Error::domain("a plot needs at least two mesh levels"));
    }
    let functions = report.functions();
    let elements = report.elements();
    let cols = (functions.len() as f64).sqrt().ceil() as usize;
    let rows = functions.len().div_ceil(cols);

    let mut s = String::new();
    let m = &report.metadata;
    let _ = writeln!(s, "# L1 errors (not normalized by domain area) against number of triangles");
    let _ = writeln!(
        s,
        "# mesh {}, triangle rule degree {}{}, config {}",
        m.mesh,
        m.quad_degree,
        if m.subdivided { " subdivided" } else { "" },
        m.config_hash
    );
    let _ = writeln!(s, "set terminal pngcairo size {},{}", 600 * cols, 450 * rows);
    let _ = writeln!(s, "set output '{image}'");
    for (fi, function) in functions.iter().enumerate() {
        for (ei, element) in elements.iter().enumerate() {
            let points: Vec<_> = report
                .series(function, element)
                .into_iter()
                .filter_map(|r| r.l1_error.map(|e| (r.n_triangles, e)))
                .collect();
            if points.is_empty() {
                continue;
            }
            let _ = writeln!(s, "$f{fi}e{ei} << EOD");
            for (n, e) in points {
                let _ = writeln!(s, "{n} {e}");
            }
            let _ = writeln!(s, "EOD");
        }
    }
    let _ = writeln!(s, "set multiplot layout {rows},{cols}");
    let _ = writeln!(s, "set logscale xy");
    let _ = writeln!(s, "set format y '%.0e'");
    let _ = writeln!(s, "set xlabel 'triangles'");
    let _ = writeln!(s, "set ylabel 'L1 error'");
    let _ = writeln!(s, "set key bottom left");
    for (fi, function) in functions.iter().enumerate() {
        // guides pass through the coarsest successful point of the panel
        let anchor = report
            .rows
            .iter()
            .filter(|r| r.function == *function)
            .filter_map(|r| r.l1_error.map(|e| (r.n_triangles as f64, e)))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap_or((1.0, 1.0));
        let _ = writeln!(s, "set title '{function}'");
        // h ~ n_triangles^(-1/2), so order p is slope -p/2 against n_triangles
        let _ = writeln!(s, "g2_{fi}(x) = {:e} * (x / {:e})**(-1.0)", anchor.1, anchor.0);
        let _ = writeln!(s, "g3_{fi}(x) = {:e} * (x / {:e})**(-1.5)", anchor.1, anchor.0);
        let mut curves: Vec<String> = elements
            .iter()
            .enumerate()
            .filter(|(_, e)| report.series(function, e).iter().any(|r| r.l1_error.is_some()))
            .map(|(ei, e)| format!("$f{fi}e{ei} using 1:2 with linespoints title '{e}'"))
            .collect();
        curves.push(format!("g2_{fi}(x) with lines dashtype 2 lc rgb 'gray' title 'order 2'"));
        curves.push(format!("g3_{fi}(x) with lines dashtype 3 lc rgb 'gray' title 'order 3'"));
        let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
    }
    let _ = writeln!(s, "unset multiplot");
    Ok(s)
}

/// Writes [`plot_script`] to `path`; the image is written next to it with a `.png` extension.
pub fn emit_plot_script(report: &ConvergenceReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let image = path.with_extension("png");
    let image = image.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    write_file(path, &plot_script(report, &image)?)
}

struct Job<'a> {
    function: &'a TestFunction,
    element: std::result::Result<&'a Element, &'a Error>,
    label: &'a str,
    mesh: &'a Mesh,
}

/// Runs every (function, element, mesh) combination.
///
/// Invalid configurations and unreadable meshes abort the run; failures of
/// individual rows (e.g. inadmissible elements) are recorded in the report.
pub fn run_convergence(config: &RunConfig) -> Result<ConvergenceReport> {
    let (functions, specs) = config.validate()?;
    let meshes = config.mesh.load()?;
    let mut rule = triangle_rule(config.quad_degree)?;
    if config.subdivide {
        rule = rule.subdivided();
    }
    let labels: Vec<String> = specs.iter().map(ElementSpec::to_string).collect();
    let elements: Vec<Result<Element>> = specs
        .iter()
        .map(|s| Element::from_spec_with_order(s, config.segment_order))
        .collect();

    let mut jobs = Vec::new();
    for function in &functions {
        for (element, label) in elements.iter().zip(&labels) {
            for mesh in &meshes {
                jobs.push(Job {
                    function,
                    element: element.as_ref(),
                    label,
                    mesh,
                });
            }
        }
    }
    let mut rows: Vec<ReportRow> = jobs
        .par_iter()
        .map(|job| {
            let f = |p: Point2| job.function.eval(p);
            let outcome = job.element.map_err(Error::kind).and_then(|element| {
                global_interpolate(job.mesh, f, element)
                    .map(|field| l1_error(&field, f, &rule).l1)
                    .map_err(|e| e.kind())
            });
            let (l1_error, failure) = match outcome {
                Ok(e) if e.is_finite() => (Some(e), None),
                Ok(_) => (None, Some("DomainError".to_string())),
                Err(kind) => (None, Some(kind.to_string())),
            };
            ReportRow {
                function: job.function.name().to_string(),
                element: job.label.to_string(),
                n_triangles: job.mesh.len(),
                h_max: job.mesh.h_max(),
                l1_error,
                order: None,
                failure,
            }
        })
        .collect();

    rows.sort_by(|a, b| {
        (&a.function, &a.element, a.n_triangles).cmp(&(&b.function, &b.element, b.n_triangles))
    });
    for i in 1..rows.len() {
        let (prev, cur) = (&rows[i - 1], &rows[i]);
        if prev.function != cur.function || prev.element != cur.element {
            continue;
        }
        let order = match (prev.l1_error, cur.l1_error) {
            (Some(e0), Some(e1)) => convergence_order(&[e0, e1], &[prev.h_max, cur.h_max])
                .ok()
                .map(|s| s.pairwise[0]),
            _ => None,
        };
        rows[i].order = order;
    }

    Ok(ConvergenceReport {
        rows,
        metadata: Metadata {
            quad_degree: config.quad_degree,
            subdivided: config.subdivide,
            segment_order: config.segment_order,
            mesh: config.mesh.to_string(),
            config_hash: config.hash(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        },
    })
}
