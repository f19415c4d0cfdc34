//! The scenario file: a versioned JSON document.
//!
//! Everything here is plain data. Turning it into core objects happens in
//! [`crate::build`], which is where parameter validation lives.

use serde::Deserialize;

use crate::error::CliError;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub metric: Option<MetricSpec>,
    #[serde(default)]
    pub geometry: Option<GeometrySpec>,
    #[serde(default)]
    pub quadrature: QuadratureDto,
    #[serde(default)]
    pub length: Option<Expectation>,
    #[serde(default)]
    pub area: Option<Expectation>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub variation: Option<VariationSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl Scenario {
    /// Parses and checks the version tag. Serde errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|e| CliError::Input(format!("scenario: {e}")))?;
        if scenario.version != SCHEMA_VERSION {
            return Err(CliError::Input(format!(
                "scenario: field `version`: unsupported schema version {:?} (expected {:?})",
                scenario.version, SCHEMA_VERSION
            )));
        }
        Ok(scenario)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureDto {
    #[serde(default = "default_gauss_order")]
    pub gauss_order: usize,
    #[serde(default = "default_cells")]
    pub cells: usize,
    /// Target absolute error for adaptive refinement; off when absent.
    #[serde(default)]
    pub adaptive: Option<f64>,
}

fn default_gauss_order() -> usize {
    8
}

fn default_cells() -> usize {
    16
}

impl Default for QuadratureDto {
    fn default() -> Self {
        Self {
            gauss_order: default_gauss_order(),
            cells: default_cells(),
            adaptive: None,
        }
    }
}

/// Expected value and tolerance for a computed quantity. Both optional: a
/// quantity without an expectation is reported as informational.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    #[serde(default)]
    pub expected: Option<f64>,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub report: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpec {
    Euclidean {
        dim: usize,
    },
    Riemannian {
        /// Rows of the symmetric positive-definite matrix.
        metric: Vec<Vec<f64>>,
        /// Conformal factor `1 + α|y|²`; constant metric when absent.
        #[serde(default)]
        conformal_alpha: Option<f64>,
    },
    Randers {
        metric: Vec<Vec<f64>>,
        #[serde(default)]
        conformal_alpha: Option<f64>,
        drift: Vec<f64>,
        /// Linear part `B` of an affine drift `b₀ + B y`.
        #[serde(default)]
        drift_matrix: Option<Vec<Vec<f64>>>,
    },
    MthRoot {
        coeffs: Vec<f64>,
    },
    ArealGram {
        k: usize,
        m: usize,
    },
    QuadraticEnergy {
        dim: usize,
    },
}

/// A piece: a catalog map on a parameter box with an orientation.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub map: MapSpec,
    /// One `[lo, hi]` pair per parameter.
    pub domain: Vec<[f64; 2]>,
    #[serde(default = "default_orientation")]
    pub orientation: i8,
}

fn default_orientation() -> i8 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub coeff: f64,
    pub exponents: Vec<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Identity {
        dim: usize,
    },
    Linear {
        matrix: Vec<Vec<f64>>,
    },
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
    },
    Polynomial {
        nvars: usize,
        components: Vec<Vec<Monomial>>,
    },
    Graph {
        nvars: usize,
        height: Vec<Monomial>,
    },
    Circle {
        #[serde(default)]
        center: Option<[f64; 2]>,
        radius: f64,
    },
    Helix {
        radius: f64,
        pitch: f64,
    },
    TorusPatch {
        major: f64,
        minor: f64,
    },
    SpherePatch {
        radius: f64,
    },
    Fourier {
        constant: Vec<f64>,
        linear: Vec<f64>,
        #[serde(default)]
        cos: Vec<Vec<f64>>,
        #[serde(default)]
        sin: Vec<Vec<f64>>,
        #[serde(default = "one")]
        omega: f64,
        #[serde(default)]
        origin: f64,
    },
    SineShift {
        a: f64,
    },
    Segment {
        from: Vec<f64>,
        to: Vec<f64>,
    },
    Polar,
    PolarInverse,
    Inclusion {
        k: usize,
        m: usize,
    },
    Projection {
        m: usize,
        k: usize,
    },
}

fn one() -> f64 {
    1.0
}

/// A differential form given by its nonzero components.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub degree: usize,
    pub dim: usize,
    #[serde(default)]
    pub terms: Vec<FormTerm>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormTerm {
    /// Strictly increasing, 1-based.
    pub index: Vec<usize>,
    pub coefficient: CoefficientSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientSpec {
    Constant(f64),
    Polynomial(Vec<Monomial>),
    Sin(TrigSpec),
    Cos(TrigSpec),
    Sum(Vec<WeightedCoefficient>),
    Product(Box<CoefficientSpec>, Box<CoefficientSpec>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigSpec {
    #[serde(default = "one")]
    pub amplitude: f64,
    pub freq: Vec<f64>,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedCoefficient {
    pub weight: f64,
    pub coefficient: CoefficientSpec,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeDto {
    #[default]
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant,
    Linear,
    Sin { omega: f64 },
    Cos { omega: f64 },
    Exp { rate: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyTerm {
    pub time: ProfileSpec,
    pub form: FormSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CoverSpec {
    /// `[parts, overlap]` on every axis.
    Uniform { parts: usize, overlap: f64 },
    /// Explicit sub-boxes, each a list of `[lo, hi]`.
    Boxes(Vec<Vec<[f64; 2]>>),
}

/// A named verification. `label` overrides the row name in reports.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    Homogeneity {
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        tolerance: Option<f64>,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_lambdas")]
        lambdas: Vec<f64>,
    },
    Projectability {
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        tolerance: Option<f64>,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_lambdas")]
        lambdas: Vec<f64>,
    },
    Euler {
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        tolerance: Option<f64>,
        #[serde(default = "default_curve_samples")]
        samples: usize,
    },
    DualRoute {
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        tolerance: Option<f64>,
    },
    Stokes {
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        tolerance: Option<f64>,
        form: FormSpec,
        #[serde(default)]
        derivative: DerivativeDto,
    },
    DomainTransform {
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        tolerance: Option<f64>,
        form: FormSpec,
        alpha: MapSpec,
    },
    Leibniz {
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        tolerance: Option<f64>,
        family: Vec<FamilyTerm>,
        t0: f64,
        #[serde(default = "default_dt")]
        dt: f64,
    },
    Partition {
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        tolerance: Option<f64>,
        form: FormSpec,
        covers: [CoverSpec; 2],
    },
    Reparametrization {
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        tolerance: Option<f64>,
        rho: MapSpec,
    },
    CauchyBinet {
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        tolerance: Option<f64>,
        #[serde(default = "default_instances")]
        instances: usize,
    },
    Grassmann {
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        tolerance: Option<f64>,
        #[serde(default = "default_grassmann_instances")]
        instances: usize,
    },
}

fn default_samples() -> usize {
    100
}

fn default_lambdas() -> Vec<f64> {
    vec![0.5, 2.0, 10.0]
}

fn default_curve_samples() -> usize {
    64
}

fn default_dt() -> f64 {
    1e-4
}

fn default_instances() -> usize {
    50
}

fn default_grassmann_instances() -> usize {
    200
}

impl CheckSpec {
    /// The check's schema name.
    pub fn kind(&self) -> &'static str {
        match self {
            CheckSpec::Homogeneity { .. } => "homogeneity",
            CheckSpec::Projectability { .. } => "projectability",
            CheckSpec::Euler { .. } => "euler",
            CheckSpec::DualRoute { .. } => "dual_route",
            CheckSpec::Stokes { .. } => "stokes",
            CheckSpec::DomainTransform { .. } => "domain_transform",
            CheckSpec::Leibniz { .. } => "leibniz",
            CheckSpec::Partition { .. } => "partition",
            CheckSpec::Reparametrization { .. } => "reparametrization",
            CheckSpec::CauchyBinet { .. } => "cauchy_binet",
            CheckSpec::Grassmann { .. } => "grassmann",
        }
    }

    pub fn label(&self) -> &str {
        let label = match self {
            CheckSpec::Homogeneity { label, .. }
            | CheckSpec::Projectability { label, .. }
            | CheckSpec::Euler { label, .. }
            | CheckSpec::DualRoute { label, .. }
            | CheckSpec::Stokes { label, .. }
            | CheckSpec::DomainTransform { label, .. }
            | CheckSpec::Leibniz { label, .. }
            | CheckSpec::Partition { label, .. }
            | CheckSpec::Reparametrization { label, .. }
            | CheckSpec::CauchyBinet { label, .. }
            | CheckSpec::Grassmann { label, .. } => label,
        };
        label.as_deref().unwrap_or_else(|| self.kind())
    }

    /// The tolerance given in the file, or the default for this check.
    pub fn tolerance(&self) -> f64 {
        let (given, default) = match self {
            CheckSpec::Homogeneity { tolerance, .. }
            | CheckSpec::Projectability { tolerance, .. } => (tolerance, 1e-11),
            CheckSpec::Euler { tolerance, .. } => (tolerance, 1e-11),
            CheckSpec::DualRoute { tolerance, .. } => (tolerance, 1e-10),
            CheckSpec::Stokes { tolerance, .. } | CheckSpec::DomainTransform { tolerance, .. } => {
                (tolerance, 1e-10)
            }
            CheckSpec::Leibniz { tolerance, .. } => (tolerance, 1e-7),
            CheckSpec::Partition { tolerance, .. }
            | CheckSpec::Reparametrization { tolerance, .. } => (tolerance, 1e-8),
            CheckSpec::CauchyBinet { tolerance, .. } => (tolerance, 1e-10),
            CheckSpec::Grassmann { tolerance, .. } => (tolerance, 1e-13),
        };
        given.unwrap_or(default)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationSpec {
    /// Explicit fields; the default sine-bump basis when empty.
    #[serde(default)]
    pub fields: Vec<VariationFieldSpec>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_extremal_tolerance")]
    pub tolerance: f64,
}

fn default_epsilon() -> f64 {
    1e-4
}

fn default_extremal_tolerance() -> f64 {
    1e-6
}

/// `Σ amplitude · sin(π frequency (t − a)/(b − a)) e_coordinate`, with
/// 1-based coordinates.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationFieldSpec {
    pub terms: Vec<BumpSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpSpec {
    pub coordinate: usize,
    pub frequency: u32,
    #[serde(default = "one")]
    pub amplitude: f64,
}
