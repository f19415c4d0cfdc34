//! Executes one subcommand on a parsed scenario.
//!
//! Nothing is written here: a run either yields every row or fails, so the
//! caller can guarantee that errors leave no partial output behind.

use std::time::Instant;

use areal_core::finsler::{
    check_homogeneity, check_projectability, pullback_identity_residual, FinslerFunction,
};
use areal_core::forms::{
    integrate_with_partition, verify_domain_transform, verify_leibniz, verify_stokes_with, Piece,
};
use areal_core::functional::{
    areal_value, curve_length, extremal_residual, first_variation, reparam_invariance_residual,
};
use areal_core::grassmann::{grassmann_transition, to_grassmann};
use areal_core::kvector::lift_kvector;
use areal_core::maps::Composition;
use areal_core::multiindex::binomial;
use areal_core::polynomial::Polynomial;
use areal_core::quadrature::QuadratureSpec;
use areal_core::{CatalogMap, Error, KVector, MultiIndex, SharedMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::build;
use crate::error::CliError;
use crate::report::Row;
use crate::scenario::{CheckSpec, Scenario};

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Length,
    Area,
    /// All checks of the scenario, or only those with this name or label.
    Check(Option<String>),
    Variation,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Length => "length",
            Command::Area => "area",
            Command::Check(_) => "check",
            Command::Variation => "variation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub seed: u64,
    pub gauss_order: Option<usize>,
    pub cells: Option<usize>,
    /// Fill the `seconds` column with wall time. Off by default so that
    /// repeated runs produce identical CSV.
    pub timing: bool,
    /// Also sample the integrand for plotting.
    pub plot: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            seed: 42,
            gauss_order: None,
            cells: None,
            timing: false,
            plot: false,
        }
    }
}

/// Sampled integrand values: parameter coordinates followed by the value.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub header: Vec<String>,
    pub rows: Vec<Row>,
    pub plot: Option<PlotData>,
}

const LENGTH_TOLERANCE: f64 = 1e-8;
const AREA_TOLERANCE: f64 = 1e-8;
/// Chart transitions whose target pivot is smaller than this are skipped.
const TRANSITION_PIVOT_FLOOR: f64 = 1e-6;

pub fn run(scenario: &Scenario, command: &Command, opts: &Options) -> Result<Outcome> {
    let q = build::quadrature(&scenario.quadrature, opts.gauss_order, opts.cells)?;
    let header = vec![
        format!("areal {}", env!("CARGO_PKG_VERSION")),
        format!(
            "scenario: {}",
            scenario.name.as_deref().unwrap_or("(unnamed)")
        ),
        format!("command: {}", command.name()),
        format!("seed: {}", opts.seed),
        format!(
            "quadrature: gauss_order {}, cells {}{}",
            q.gauss_order,
            q.cells_per_axis,
            q.adaptive
                .map(|t| format!(", adaptive {t:e}"))
                .unwrap_or_default()
        ),
    ];
    let (mut rows, plot) = match command {
        Command::Length => length(scenario, &q, opts)?,
        Command::Area => area(scenario, &q, opts)?,
        Command::Check(name) => (checks(scenario, name.as_deref(), &q, opts)?, None),
        Command::Variation => (variation(scenario, &q, opts)?, None),
    };
    if !opts.timing {
        rows.iter_mut().for_each(|r| r.seconds = 0.0);
    }
    Ok(Outcome { header, rows, plot })
}

fn require<'a, T>(x: &'a Option<T>, field: &str, command: &str) -> Result<&'a T> {
    x.as_ref()
        .ok_or_else(|| CliError::Input(format!("field `{field}`: required by `{command}`")))
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64()))
}

fn length(
    s: &Scenario,
    q: &QuadratureSpec,
    opts: &Options,
) -> Result<(Vec<Row>, Option<PlotData>)> {
    let f = build::metric(require(&s.metric, "metric", "length")?)?;
    let (curve, interval) = build::curve(require(&s.geometry, "geometry", "length")?)?;
    let (l, seconds) =
        timed(|| curve_length(&f, &curve, interval, q).map_err(|e| CliError::core("length", e)))?;
    let expectation = s.length.clone().unwrap_or_default();
    let mut main = match expectation.expected {
        Some(e) => Row::expect(
            "length",
            l.value,
            e,
            expectation.tolerance.unwrap_or(LENGTH_TOLERANCE),
        ),
        None => Row::info("length", l.value),
    };
    main.seconds = seconds;
    let mut rows = vec![main];
    if l.homogeneous {
        rows.push(Row::expect(
            "length_dual_route",
            l.hilbert_value,
            l.value,
            1e-10 * l.value.abs().max(1.0),
        ));
    } else {
        rows.push(Row::info("length_hilbert", l.hilbert_value));
    }
    let plot = if opts.plot {
        let integrand = |t: &[f64]| -> Result<f64> {
            let y = curve.eval(t).map_err(|e| CliError::core("plot", e))?;
            let v = curve
                .jacobian(t)
                .map_err(|e| CliError::core("plot", e))?
                .column(0);
            f.eval(&y, &v).map_err(|e| CliError::core("plot", e))
        };
        Some(sample_grid(&[interval], integrand)?)
    } else {
        None
    };
    Ok((rows, plot))
}

fn area(s: &Scenario, q: &QuadratureSpec, opts: &Options) -> Result<(Vec<Row>, Option<PlotData>)> {
    let omega = build::piece(require(&s.geometry, "geometry", "area")?)?;
    let (k, m) = (omega.degree(), omega.ambient_dim());
    let l = match &s.metric {
        Some(spec) => build::metric(spec)?,
        None => {
            FinslerFunction::areal_gram(k, m).map_err(|e| CliError::core("field `geometry`", e))?
        }
    };
    let (v, seconds) = timed(|| areal_value(&l, &omega, q).map_err(|e| CliError::core("area", e)))?;
    let expectation = s.area.clone().unwrap_or_default();
    let mut main = match expectation.expected {
        Some(e) => Row::expect(
            "area",
            v.value,
            e,
            expectation.tolerance.unwrap_or(AREA_TOLERANCE),
        ),
        None => Row::info("area", v.value),
    };
    main.seconds = seconds;
    let mut rows = vec![main];
    if v.degenerate_nodes > 0 {
        rows.push(Row::info(
            "area_degenerate_nodes",
            v.degenerate_nodes as f64,
        ));
    }
    let plot = if opts.plot {
        let integrand = |t: &[f64]| -> Result<f64> {
            let y = omega.map().eval(t).map_err(|e| CliError::core("plot", e))?;
            let xi = areal_core::kvector::canonical_lift(omega.map().as_ref(), t)
                .map_err(|e| CliError::core("plot", e))?;
            let xi: Vec<f64> = xi
                .comps()
                .iter()
                .map(|c| f64::from(omega.orientation()) * c)
                .collect();
            match l.eval(&y, &xi) {
                Err(Error::SlitDomain) => Ok(0.0),
                r => r.map_err(|e| CliError::core("plot", e)),
            }
        };
        Some(sample_grid(omega.param_box(), integrand)?)
    } else {
        None
    };
    Ok((rows, plot))
}

/// Uniform samples including the box corners: 201 per axis for curves,
/// 41 for surfaces, 11 beyond.
fn sample_grid(
    param_box: &[(f64, f64)],
    mut f: impl FnMut(&[f64]) -> Result<f64>,
) -> Result<PlotData> {
    let k = param_box.len();
    let n: usize = match k {
        1 => 201,
        2 => 41,
        _ => 11,
    };
    let mut columns: Vec<String> = (1..=k).map(|i| format!("t{i}")).collect();
    columns.push("integrand".into());
    let mut rows = Vec::with_capacity(n.pow(k as u32));
    for flat in 0..n.pow(k as u32) {
        let mut rest = flat;
        let t: Vec<f64> = param_box
            .iter()
            .map(|&(lo, hi)| {
                let i = rest % n;
                rest /= n;
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            })
            .collect();
        let v = f(&t)?;
        let mut row = t;
        row.push(v);
        rows.push(row);
    }
    Ok(PlotData { columns, rows })
}

/// Checks that need no data beyond the metric, runnable by name even when
/// the scenario does not list them.
fn default_check(name: &str) -> Option<CheckSpec> {
    let json = format!(r#"{{"name": "{name}"}}"#);
    match name {
        "homogeneity" | "projectability" | "euler" | "dual_route" | "cauchy_binet"
        | "grassmann" => serde_json::from_str(&json).ok(),
        _ => None,
    }
}

fn checks(
    s: &Scenario,
    filter: Option<&str>,
    q: &QuadratureSpec,
    opts: &Options,
) -> Result<Vec<Row>> {
    let mut selected: Vec<(usize, CheckSpec)> = s
        .checks
        .iter()
        .enumerate()
        .filter(|(_, c)| filter.is_none_or(|n| c.label() == n || c.kind() == n))
        .map(|(i, c)| (i, c.clone()))
        .collect();
    if selected.is_empty() {
        match filter {
            Some(name) => match default_check(name) {
                Some(c) => selected.push((s.checks.len(), c)),
                None => {
                    return Err(CliError::Input(format!(
                        "field `checks`: no check named `{name}`"
                    )))
                }
            },
            None => {
                return Err(CliError::Input(
                    "field `checks`: required by `check`".into(),
                ))
            }
        }
    }
    let mut rows = Vec::with_capacity(selected.len());
    for (stream, spec) in selected {
        // one independent stream per list position keeps a check's samples
        // the same whether it runs alone or with the others
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(stream as u64);
        let (residual, seconds) = timed(|| run_check(s, &spec, q, &mut rng))?;
        let mut row = Row::check(spec.label(), residual, spec.tolerance());
        row.seconds = seconds;
        rows.push(row);
    }
    Ok(rows)
}

fn run_check(
    s: &Scenario,
    spec: &CheckSpec,
    q: &QuadratureSpec,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let name = spec.kind();
    let ctx = |e| CliError::core(format_args!("check `{name}`"), e);
    let metric =
        || -> Result<FinslerFunction> { build::metric(require(&s.metric, "metric", name)?) };
    let geometry = || require(&s.geometry, "geometry", name);
    let piece = || -> Result<Piece> { build::piece(geometry()?) };
    match spec {
        CheckSpec::Homogeneity {
            samples, lambdas, ..
        } => check_homogeneity(&metric()?, *samples, lambdas, rng).map_err(ctx),
        CheckSpec::Projectability {
            samples, lambdas, ..
        } => check_projectability(&metric()?, *samples, lambdas, rng).map_err(ctx),
        CheckSpec::Euler { samples, .. } => {
            let (curve, (a, b)) = build::curve(geometry()?)?;
            let n = (*samples).max(1);
            let ts: Vec<f64> = (0..n)
                .map(|i| a + (b - a) * (i as f64 + 0.5) / n as f64)
                .collect();
            pullback_identity_residual(&metric()?, &curve, &ts).map_err(ctx)
        }
        CheckSpec::DualRoute { .. } => {
            let (curve, interval) = build::curve(geometry()?)?;
            match curve_length(&metric()?, &curve, interval, q) {
                Ok(l) => Ok(l.dual_residual()),
                Err(Error::DualRouteMismatch(r)) => Ok(r),
                Err(e) => Err(ctx(e)),
            }
        }
        CheckSpec::Stokes {
            form, derivative, ..
        } => {
            let eta = build::form(form, "checks.form")?;
            verify_stokes_with(&eta, &piece()?, q, build::derivative_mode(*derivative)).map_err(ctx)
        }
        CheckSpec::DomainTransform { form, alpha, .. } => {
            let eta = build::form(form, "checks.form")?;
            let alpha = build::catalog_map(alpha, "checks.alpha")?;
            verify_domain_transform(&eta, &alpha, &piece()?, q).map_err(ctx)
        }
        CheckSpec::Leibniz { family, t0, dt, .. } => {
            let family = build::family(family, "checks.family")?;
            verify_leibniz(&family, &piece()?, *t0, *dt, q).map_err(ctx)
        }
        CheckSpec::Partition { form, covers, .. } => {
            let eta = build::form(form, "checks.form")?;
            let omega = piece()?;
            let mut values = [0.0; 2];
            for (v, cover) in values.iter_mut().zip(covers) {
                let p = build::partition(cover, omega.param_box(), "checks.covers")?;
                *v = integrate_with_partition(&eta, &omega, &p, q)
                    .map_err(ctx)?
                    .value;
            }
            Ok((values[0] - values[1]).abs())
        }
        CheckSpec::Reparametrization { rho, .. } => {
            let (curve, interval) = build::curve(geometry()?)?;
            let rho = build::map(rho, "checks.rho")?;
            reparam_invariance_residual(&metric()?, &curve, interval, &rho, q).map_err(ctx)
        }
        CheckSpec::CauchyBinet { instances, .. } => {
            cauchy_binet_residual(*instances, rng).map_err(ctx)
        }
        CheckSpec::Grassmann { instances, .. } => {
            grassmann_round_trip(*instances, rng).map_err(ctx)
        }
    }
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// A random quadratic polynomial map `Rⁿ → Rᵐ`.
fn random_quadratic_map(rng: &mut ChaCha8Rng, n: usize, m: usize) -> areal_core::Result<SharedMap> {
    let mut components = Vec::with_capacity(m);
    for _ in 0..m {
        let mut terms = vec![(rng.gen_range(-1.0..=1.0), vec![0; n])];
        for a in 0..n {
            let mut e = vec![0; n];
            e[a] = 1;
            terms.push((rng.gen_range(-2.0..=2.0), e.clone()));
            for b in a..n {
                let mut e2 = vec![0; n];
                e2[a] += 1;
                e2[b] += 1;
                terms.push((rng.gen_range(-1.0..=1.0), e2));
            }
        }
        components.push(Polynomial::new(n, terms)?);
    }
    Ok(CatalogMap::polynomial(components)?.into_shared())
}

/// `max |Λᵏ(g∘f) Ξ − Λᵏg (Λᵏf Ξ)|` over random polynomial pairs.
fn cauchy_binet_residual(instances: usize, rng: &mut ChaCha8Rng) -> areal_core::Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let n = rng.gen_range(1..=3);
        let p = rng.gen_range(n..=4);
        let m = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=n.min(m));
        let f = random_quadratic_map(rng, n, p)?;
        let g = random_quadratic_map(rng, p, m)?;
        let gf = Composition::new(g.clone(), f.clone())?;
        let xi = KVector::new(random_vec(rng, n), k, random_vec(rng, binomial(n, k)))?;
        let direct = lift_kvector(&gf, &xi)?;
        let stepwise = lift_kvector(g.as_ref(), &lift_kvector(f.as_ref(), &xi)?)?;
        for (a, b) in direct.comps().iter().zip(stepwise.comps()) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

/// `max |w − T_{ν'→ν}(T_{ν→ν'}(w))|` over random k-vectors and pivots.
fn grassmann_round_trip(instances: usize, rng: &mut ChaCha8Rng) -> areal_core::Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let m = rng.gen_range(2..=5);
        let k = rng.gen_range(1..m);
        let xi = KVector::new(random_vec(rng, m), k, random_vec(rng, binomial(m, k)))?;
        let p = to_grassmann(&xi, None)?;
        let other = MultiIndex::from_rank(rng.gen_range(0..binomial(m, k)), k, m)?;
        let q = match grassmann_transition(&p, &other, TRANSITION_PIVOT_FLOOR) {
            Ok(q) => q,
            Err(Error::NotInChart(_)) => continue,
            Err(e) => return Err(e),
        };
        let back = grassmann_transition(&q, p.pivot(), 0.0)?;
        for (a, b) in back.w().iter().zip(p.w()) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

fn variation(s: &Scenario, q: &QuadratureSpec, _opts: &Options) -> Result<Vec<Row>> {
    let f = build::metric(require(&s.metric, "metric", "variation")?)?;
    let (curve, interval) = build::curve(require(&s.geometry, "geometry", "variation")?)?;
    let spec = require(&s.variation, "variation", "variation")?;
    let fields = build::variation_fields(spec, f.dim(), interval)?;
    let ctx = |e| CliError::core("variation", e);
    let mut rows = Vec::with_capacity(fields.len() + 1);
    for (i, v) in fields.iter().enumerate() {
        let (d, seconds) =
            timed(|| first_variation(&f, &curve, interval, v, spec.epsilon, q).map_err(ctx))?;
        let mut row = Row::info(format!("first_variation_{}", i + 1), d.value);
        row.seconds = seconds;
        rows.push(row);
        if !d.consistent {
            rows.push(Row::info(
                format!("first_variation_{}_half_step", i + 1),
                d.half_step,
            ));
        }
    }
    let (r, seconds) =
        timed(|| extremal_residual(&f, &curve, interval, &fields, spec.epsilon, q).map_err(ctx))?;
    let mut row = Row::check("extremal_residual", r.value, spec.tolerance);
    row.seconds = seconds;
    rows.push(row);
    Ok(rows)
}
