//! Scenario data to core objects. Every error names the offending field.

use std::sync::Arc;

use areal_core::finsler::{CovectorField, FinslerFunction, MetricField};
use areal_core::forms::{
    Coefficient, DerivativeMode, FormFamily, KForm, PartitionOfUnity, Piece, TimeProfile,
};
use areal_core::functional::VariationField;
use areal_core::maps::Composition;
use areal_core::polynomial::Polynomial;
use areal_core::quadrature::QuadratureSpec;
use areal_core::{CatalogMap, Matrix, MultiIndex, SharedMap};

use crate::error::CliError;
use crate::scenario::{
    CoefficientSpec, CoverSpec, DerivativeDto, FamilyTerm, FormSpec, GeometrySpec, MapSpec,
    MetricSpec, Monomial, ProfileSpec, QuadratureDto, VariationSpec,
};

type Result<T> = std::result::Result<T, CliError>;

fn matrix(rows: &[Vec<f64>], field: &str) -> Result<Matrix> {
    Matrix::from_rows(rows).map_err(|e| CliError::core(format_args!("field `{field}`"), e))
}

fn polynomial(nvars: usize, monomials: &[Monomial], field: &str) -> Result<Polynomial> {
    let terms = monomials
        .iter()
        .map(|m| (m.coeff, m.exponents.clone()))
        .collect();
    Polynomial::new(nvars, terms).map_err(|e| CliError::core(format_args!("field `{field}`"), e))
}

pub fn catalog_map(spec: &MapSpec, field: &str) -> Result<CatalogMap> {
    let ctx = |e| CliError::core(format_args!("field `{field}`"), e);
    Ok(match spec {
        MapSpec::Identity { dim } => CatalogMap::Identity { dim: *dim },
        MapSpec::Linear { matrix: m } => CatalogMap::linear(matrix(m, field)?),
        MapSpec::Affine { matrix: m, offset } => {
            CatalogMap::affine(matrix(m, field)?, offset.clone()).map_err(ctx)?
        }
        MapSpec::Polynomial { nvars, components } => {
            let comps = components
                .iter()
                .enumerate()
                .map(|(i, c)| polynomial(*nvars, c, &format!("{field}.components[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            CatalogMap::polynomial(comps).map_err(ctx)?
        }
        MapSpec::Graph { nvars, height } => CatalogMap::Graph {
            height: polynomial(*nvars, height, &format!("{field}.height"))?,
        },
        MapSpec::Circle { center, radius } => CatalogMap::Circle {
            center: center.unwrap_or([0.0, 0.0]),
            radius: *radius,
        },
        MapSpec::Helix { radius, pitch } => CatalogMap::Helix {
            radius: *radius,
            pitch: *pitch,
        },
        MapSpec::TorusPatch { major, minor } => CatalogMap::TorusPatch {
            major: *major,
            minor: *minor,
        },
        MapSpec::SpherePatch { radius } => CatalogMap::SpherePatch { radius: *radius },
        MapSpec::Fourier {
            constant,
            linear,
            cos,
            sin,
            omega,
            origin,
        } => CatalogMap::fourier(
            constant.clone(),
            linear.clone(),
            cos.clone(),
            sin.clone(),
            *omega,
            *origin,
        )
        .map_err(ctx)?,
        MapSpec::SineShift { a } => CatalogMap::sine_shift(*a),
        MapSpec::Segment { from, to } => CatalogMap::segment(from, to).map_err(ctx)?,
        MapSpec::Polar => CatalogMap::Polar,
        MapSpec::PolarInverse => CatalogMap::PolarInverse,
        MapSpec::Inclusion { k, m } => {
            if k > m {
                return Err(CliError::Input(format!(
                    "field `{field}`: inclusion needs k ≤ m"
                )));
            }
            CatalogMap::Inclusion { k: *k, m: *m }
        }
        MapSpec::Projection { m, k } => {
            if k > m {
                return Err(CliError::Input(format!(
                    "field `{field}`: projection needs k ≤ m"
                )));
            }
            CatalogMap::Projection { m: *m, k: *k }
        }
    })
}

pub fn metric(spec: &MetricSpec) -> Result<FinslerFunction> {
    let ctx = |e| CliError::core("field `metric`", e);
    let field = |metric: &[Vec<f64>], alpha: Option<f64>| -> Result<MetricField> {
        let g = matrix(metric, "metric.metric")?;
        Ok(match alpha {
            None => MetricField::Constant(g),
            Some(alpha) => MetricField::Conformal { base: g, alpha },
        })
    };
    match spec {
        MetricSpec::Euclidean { dim } => FinslerFunction::euclidean(*dim).map_err(ctx),
        MetricSpec::Riemannian {
            metric,
            conformal_alpha,
        } => FinslerFunction::riemannian(field(metric, *conformal_alpha)?).map_err(ctx),
        MetricSpec::Randers {
            metric,
            conformal_alpha,
            drift,
            drift_matrix,
        } => {
            let drift = match drift_matrix {
                None => CovectorField::Constant(drift.clone()),
                Some(b) => CovectorField::Affine {
                    base: drift.clone(),
                    matrix: matrix(b, "metric.drift_matrix")?,
                },
            };
            FinslerFunction::randers(field(metric, *conformal_alpha)?, drift).map_err(ctx)
        }
        MetricSpec::MthRoot { coeffs } => FinslerFunction::mth_root(coeffs.clone()).map_err(ctx),
        MetricSpec::ArealGram { k, m } => FinslerFunction::areal_gram(*k, *m).map_err(ctx),
        MetricSpec::QuadraticEnergy { dim } => FinslerFunction::quadratic_energy(*dim).map_err(ctx),
    }
}

pub fn map(spec: &MapSpec, field: &str) -> Result<SharedMap> {
    Ok(catalog_map(spec, field)?.into_shared())
}

pub fn piece(spec: &GeometrySpec) -> Result<Piece> {
    if spec.orientation != 1 && spec.orientation != -1 {
        return Err(CliError::Input(
            "field `geometry.orientation`: must be 1 or -1".into(),
        ));
    }
    let domain = spec.domain.iter().map(|&[a, b]| (a, b)).collect();
    let f = map(&spec.map, "geometry.map")?;
    Piece::new(domain, f, spec.orientation).map_err(|e| CliError::core("field `geometry`", e))
}

/// A curve with its interval, traversed backwards when the orientation is
/// negative.
pub fn curve(spec: &GeometrySpec) -> Result<(SharedMap, (f64, f64))> {
    let p = piece(spec)?;
    if p.degree() != 1 {
        return Err(CliError::Input(format!(
            "field `geometry.domain`: a curve needs 1 parameter, got {}",
            p.degree()
        )));
    }
    let (a, b) = p.param_box()[0];
    if p.orientation() == 1 {
        return Ok((p.map().clone(), (a, b)));
    }
    let flip = CatalogMap::affine(Matrix::from_rows(&[vec![-1.0]]).expect("1×1"), vec![a + b])
        .expect("matching offset")
        .into_shared();
    let reversed = Composition::new(p.map().clone(), flip)
        .map_err(|e| CliError::core("field `geometry`", e))?;
    Ok((Arc::new(reversed), (a, b)))
}

pub fn coefficient(spec: &CoefficientSpec, dim: usize, field: &str) -> Result<Coefficient> {
    Ok(match spec {
        CoefficientSpec::Constant(c) => Coefficient::Constant(*c),
        CoefficientSpec::Polynomial(terms) => {
            Coefficient::Polynomial(polynomial(dim, terms, field)?)
        }
        CoefficientSpec::Sin(t) | CoefficientSpec::Cos(t) => {
            if t.freq.len() != dim {
                return Err(CliError::Input(format!(
                    "field `{field}.freq`: expected {dim} frequencies, got {}",
                    t.freq.len()
                )));
            }
            if matches!(spec, CoefficientSpec::Sin(_)) {
                Coefficient::sin(t.amplitude, t.freq.clone(), t.phase)
            } else {
                Coefficient::cos(t.amplitude, t.freq.clone(), t.phase)
            }
        }
        CoefficientSpec::Sum(parts) => Coefficient::Sum(
            parts
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    Ok((
                        w.weight,
                        coefficient(&w.coefficient, dim, &format!("{field}.sum[{i}]"))?,
                    ))
                })
                .collect::<Result<_>>()?,
        ),
        CoefficientSpec::Product(a, b) => Coefficient::Product(
            Box::new(coefficient(a, dim, &format!("{field}.product[0]"))?),
            Box::new(coefficient(b, dim, &format!("{field}.product[1]"))?),
        ),
    })
}

pub fn form(spec: &FormSpec, field: &str) -> Result<KForm> {
    let mut terms = Vec::with_capacity(spec.terms.len());
    for (i, t) in spec.terms.iter().enumerate() {
        let f = format!("{field}.terms[{i}]");
        let index = MultiIndex::new(&t.index, spec.dim)
            .map_err(|e| CliError::core(format_args!("field `{f}.index`"), e))?;
        if index.degree() != spec.degree {
            return Err(CliError::Input(format!(
                "field `{f}.index`: expected {} indices",
                spec.degree
            )));
        }
        terms.push((
            index,
            coefficient(&t.coefficient, spec.dim, &format!("{f}.coefficient"))?,
        ));
    }
    KForm::from_terms(spec.degree, spec.dim, terms)
        .map_err(|e| CliError::core(format_args!("field `{field}`"), e))
}

pub fn family(terms: &[FamilyTerm], field: &str) -> Result<FormFamily> {
    let built = terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            Ok((
                profile(t.time),
                form(&t.form, &format!("{field}[{i}].form"))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    FormFamily::new(built).map_err(|e| CliError::core(format_args!("field `{field}`"), e))
}

fn profile(p: ProfileSpec) -> TimeProfile {
    match p {
        ProfileSpec::Constant => TimeProfile::Constant,
        ProfileSpec::Linear => TimeProfile::Linear,
        ProfileSpec::Sin { omega } => TimeProfile::Sin { omega },
        ProfileSpec::Cos { omega } => TimeProfile::Cos { omega },
        ProfileSpec::Exp { rate } => TimeProfile::Exp { rate },
    }
}

pub fn derivative_mode(d: DerivativeDto) -> DerivativeMode {
    match d {
        DerivativeDto::Analytic => DerivativeMode::Analytic,
        DerivativeDto::FiniteDifference => DerivativeMode::FiniteDifference,
    }
}

pub fn partition(
    cover: &CoverSpec,
    param_box: &[(f64, f64)],
    field: &str,
) -> Result<PartitionOfUnity> {
    let ctx = |e| CliError::core(format_args!("field `{field}`"), e);
    match cover {
        CoverSpec::Uniform { parts, overlap } => {
            PartitionOfUnity::uniform(param_box.to_vec(), *parts, *overlap).map_err(ctx)
        }
        CoverSpec::Boxes(boxes) => {
            let cover = boxes
                .iter()
                .map(|b| b.iter().map(|&[lo, hi]| (lo, hi)).collect())
                .collect();
            PartitionOfUnity::new(param_box.to_vec(), cover).map_err(ctx)
        }
    }
}

/// Quadrature from the scenario, with command-line overrides.
pub fn quadrature(
    dto: &QuadratureDto,
    gauss_order: Option<usize>,
    cells: Option<usize>,
) -> Result<QuadratureSpec> {
    let q = QuadratureSpec::new(
        gauss_order.unwrap_or(dto.gauss_order),
        cells.unwrap_or(dto.cells),
    )
    .map_err(|e| CliError::core("field `quadrature`", e))?;
    match dto.adaptive {
        None => Ok(q),
        Some(target) => {
            let q = q.with_adaptive(target);
            q.validate()
                .map_err(|e| CliError::core("field `quadrature.adaptive`", e))?;
            Ok(q)
        }
    }
}

pub fn variation_fields(
    spec: &VariationSpec,
    m: usize,
    interval: (f64, f64),
) -> Result<Vec<VariationField>> {
    if spec.fields.is_empty() {
        return VariationField::default_basis(m, interval)
            .map_err(|e| CliError::core("field `variation`", e));
    }
    spec.fields
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let mut terms = Vec::with_capacity(f.terms.len());
            for b in &f.terms {
                if b.coordinate == 0 {
                    return Err(CliError::Input(format!(
                        "field `variation.fields[{i}]`: coordinates are 1-based"
                    )));
                }
                terms.push((b.coordinate - 1, b.frequency, b.amplitude));
            }
            VariationField::new(m, interval, terms)
                .map_err(|e| CliError::core(format_args!("field `variation.fields[{i}]`"), e))
        })
        .collect()
}
