use alloc::vec::Vec;

use num_traits::Float;

use super::partition::PartitionOfUnity;
use super::KForm;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::maps::{CatalogMap, Composition, SharedMap};
use crate::multiindex::enumerate_any;
use crate::quadrature::{integrate_box, pairwise_sum, validate_box, ParamBox, QuadratureSpec};

/// The oriented image of a parameter box under an immersion.
#[derive(Clone)]
pub struct Piece {
    param_box: ParamBox,
    map: SharedMap,
    orientation: i8,
}

impl core::fmt::Debug for Piece {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Piece")
            .field("param_box", &self.param_box)
            .field("codomain_dim", &self.map.codomain_dim())
            .field("orientation", &self.orientation)
            .finish()
    }
}

/// Samples per axis for the construction-time immersion check.
const IMMERSION_GRID: usize = 3;

impl Piece {
    /// Checks the box, the map's signature, and that the map is immersive at
    /// a grid of interior sample points.
    pub fn new(param_box: ParamBox, map: SharedMap, orientation: i8) -> Result<Self> {
        let piece = Self::new_unchecked(param_box, map, orientation)?;
        let k = piece.degree();
        for flat in 0..IMMERSION_GRID.pow(k as u32) {
            let mut rest = flat;
            let t: Vec<f64> = piece
                .param_box
                .iter()
                .map(|&(lo, hi)| {
                    let i = rest % IMMERSION_GRID;
                    rest /= IMMERSION_GRID;
                    lo + (hi - lo) * (i as f64 + 0.5) / IMMERSION_GRID as f64
                })
                .collect();
            if is_degenerate(&piece.map.jacobian(&t)?) {
                return Err(Error::ImmersionFailure(t));
            }
        }
        Ok(piece)
    }

    pub(crate) fn new_unchecked(
        param_box: ParamBox,
        map: SharedMap,
        orientation: i8,
    ) -> Result<Self> {
        validate_box(&param_box)?;
        if map.domain_dim() != param_box.len() {
            return Err(Error::DimensionMismatch {
                expected: param_box.len(),
                got: map.domain_dim(),
            });
        }
        if orientation != 1 && orientation != -1 {
            return Err(Error::InvalidParameter(
                "orientation must be +1 or -1".into(),
            ));
        }
        Ok(Self {
            param_box,
            map,
            orientation,
        })
    }

    /// A 0-piece: a single oriented point.
    pub fn point(y: &[f64], orientation: i8) -> Result<Self> {
        let map = CatalogMap::affine(Matrix::zeros(y.len(), 0), y.to_vec())?.into_shared();
        Self::new_unchecked(Vec::new(), map, orientation)
    }

    pub fn degree(&self) -> usize {
        self.param_box.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.map.codomain_dim()
    }

    pub fn param_box(&self) -> &[(f64, f64)] {
        &self.param_box
    }

    pub fn map(&self) -> &SharedMap {
        &self.map
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn reversed(&self) -> Self {
        Self {
            orientation: -self.orientation,
            ..self.clone()
        }
    }

    /// The same map restricted to a sub-box.
    pub fn restricted(&self, sub: ParamBox) -> Result<Self> {
        Self::new_unchecked(sub, self.map.clone(), self.orientation)
    }
}

/// Gram determinant test: the k columns are numerically dependent.
fn is_degenerate(jac: &Matrix) -> bool {
    let k = jac.cols();
    if k == 0 {
        return false;
    }
    let scale = jac.max_abs();
    if scale == 0.0 {
        return true;
    }
    let gram = match jac.transpose().mul(jac).and_then(|g| g.det()) {
        Ok(g) => g,
        Err(_) => return true,
    };
    gram <= 1e-26 * scale.powi(2 * k as i32)
}

/// Result of integrating a form over a piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Quadrature nodes at which the piece failed to be immersed.
    pub degenerate_nodes: usize,
}

fn check_degrees(eta: &KForm, omega: &Piece) -> Result<()> {
    if eta.degree() != omega.degree() {
        return Err(Error::InvalidDegree {
            k: eta.degree(),
            m: omega.degree(),
        });
    }
    if eta.dim() != omega.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: eta.dim(),
            got: omega.ambient_dim(),
        });
    }
    Ok(())
}

/// The single top-degree coefficient of `Ω.map* η` at `t`, with a flag for
/// degenerate nodes.
fn pulled_top(eta: &KForm, map: &SharedMap, t: &[f64], rows: &[Vec<usize>]) -> Result<(f64, bool)> {
    let y = map.eval(t)?;
    let jac = map.jacobian(t)?;
    let cols: Vec<usize> = (0..eta.degree()).collect();
    let mut acc = 0.0;
    for (c, r) in eta.coeffs().iter().zip(rows) {
        if c.is_zero() {
            continue;
        }
        acc += c.value(&y)? * jac.minor(r, &cols);
    }
    Ok((acc, is_degenerate(&jac)))
}

fn row_sets(eta: &KForm) -> Vec<Vec<usize>> {
    enumerate_any(eta.degree(), eta.dim())
        .iter()
        .map(|i| i.zero_based())
        .collect()
}

/// `∫_Ω η`: orientation times the quadrature of the pulled-back coefficient.
pub fn integrate(eta: &KForm, omega: &Piece, q: &QuadratureSpec) -> Result<Integral> {
    check_degrees(eta, omega)?;
    let rows = row_sets(eta);
    let mut degenerate_nodes = 0;
    let value = integrate_box(&omega.param_box, q, |t| {
        let (v, degenerate) = pulled_top(eta, &omega.map, t, &rows)?;
        degenerate_nodes += usize::from(degenerate);
        Ok(v)
    })?;
    Ok(Integral {
        value: f64::from(omega.orientation) * value,
        degenerate_nodes,
    })
}

/// `Σ_j ∫_Ω χ_j η`, each term integrated over the sub-box carrying `χ_j`.
pub fn integrate_with_partition(
    eta: &KForm,
    omega: &Piece,
    partition: &PartitionOfUnity,
    q: &QuadratureSpec,
) -> Result<Integral> {
    check_degrees(eta, omega)?;
    if partition.param_box() != omega.param_box() {
        return Err(Error::InvalidParameter(
            "partition is not built on the piece's parameter box".into(),
        ));
    }
    let rows = row_sets(eta);
    let mut degenerate_nodes = 0;
    let mut parts = Vec::with_capacity(partition.len());
    for (j, sub) in partition.cover().iter().enumerate() {
        let v = integrate_box(sub, q, |t| {
            let chi = partition.weights(t)?[j];
            if chi == 0.0 {
                return Ok(0.0);
            }
            let (v, degenerate) = pulled_top(eta, &omega.map, t, &rows)?;
            degenerate_nodes += usize::from(degenerate);
            Ok(chi * v)
        })?;
        parts.push(v);
    }
    Ok(Integral {
        value: f64::from(omega.orientation) * pairwise_sum(&parts),
        degenerate_nodes,
    })
}

/// The `2k` faces of the parameter box with induced orientation.
///
/// Outward normal first: the face `t_a = hi` carries sign `(−1)^a`, the face
/// `t_a = lo` the opposite sign, both times the piece's own orientation.
pub fn boundary_faces(omega: &Piece) -> Result<Vec<Piece>> {
    let k = omega.degree();
    if k == 0 {
        return Err(Error::NoBoundary);
    }
    let mut faces = Vec::with_capacity(2 * k);
    for (axis, &(lo, hi)) in omega.param_box.iter().enumerate() {
        let face_box: ParamBox = omega
            .param_box
            .iter()
            .enumerate()
            .filter(|(a, _)| *a != axis)
            .map(|(_, b)| *b)
            .collect();
        let parity: i8 = if axis % 2 == 0 { 1 } else { -1 };
        for (value, side) in [(lo, -1i8), (hi, 1i8)] {
            let inclusion = CatalogMap::FaceInclusion {
                dim: k,
                axis,
                value,
            }
            .into_shared();
            let map = alloc::sync::Arc::new(Composition::new(omega.map.clone(), inclusion)?);
            faces.push(Piece::new_unchecked(
                face_box.clone(),
                map,
                omega.orientation * side * parity,
            )?);
        }
    }
    Ok(faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Coefficient;
    use crate::maps::DifferentiableMap;
    use crate::multiindex::MultiIndex;
    use crate::polynomial::Polynomial;
    use alloc::vec;
    use core::f64::consts::PI;

    fn unit_square() -> Piece {
        Piece::new(
            vec![(0.0, 1.0), (0.0, 1.0)],
            CatalogMap::Identity { dim: 2 }.into_shared(),
            1,
        )
        .unwrap()
    }

    fn y1_dy2() -> KForm {
        KForm::from_terms(
            1,
            2,
            vec![(
                MultiIndex::new(&[2], 2).unwrap(),
                Polynomial::coordinate(2, 0).into(),
            )],
        )
        .unwrap()
    }

    #[test]
    fn area_of_unit_square() {
        let eta = KForm::top(2, 1.0);
        let v = integrate(&eta, &unit_square(), &QuadratureSpec::default()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-14);
        assert_eq!(v.degenerate_nodes, 0);
        let r = integrate(&eta, &unit_square().reversed(), &QuadratureSpec::default()).unwrap();
        assert_eq!(r.value, -v.value);
    }

    #[test]
    fn y1_dy2_around_circle_is_pi() {
        let circle = Piece::new(
            vec![(0.0, 2.0 * PI)],
            CatalogMap::circle(1.0).into_shared(),
            1,
        )
        .unwrap();
        let v = integrate(&y1_dy2(), &circle, &QuadratureSpec::default()).unwrap();
        assert!((v.value - PI).abs() < 1e-12, "{}", v.value);
    }

    #[test]
    fn square_boundary_runs_counterclockwise() {
        let faces = boundary_faces(&unit_square()).unwrap();
        assert_eq!(faces.len(), 4);
        // (axis 0, lo) left, (axis 0, hi) right, (axis 1, lo) bottom, (axis 1, hi) top
        let signs: Vec<i8> = faces.iter().map(Piece::orientation).collect();
        assert_eq!(signs, vec![-1, 1, 1, -1]);
        let right = &faces[1];
        assert_eq!(right.map().eval(&[0.25]).unwrap(), vec![1.0, 0.25]);
    }

    #[test]
    fn interval_boundary_points() {
        let seg = Piece::new(
            vec![(2.0, 5.0)],
            CatalogMap::Identity { dim: 1 }.into_shared(),
            1,
        )
        .unwrap();
        let faces = boundary_faces(&seg).unwrap();
        assert_eq!(faces[0].map().eval(&[]).unwrap(), vec![2.0]);
        assert_eq!(faces[0].orientation(), -1);
        assert_eq!(faces[1].map().eval(&[]).unwrap(), vec![5.0]);
        assert_eq!(faces[1].orientation(), 1);
        assert!(matches!(boundary_faces(&faces[0]), Err(Error::NoBoundary)));
    }

    #[test]
    fn zero_piece_evaluates_function() {
        let p = Piece::point(&[2.0, 3.0], -1).unwrap();
        let f = KForm::function(2, Polynomial::coordinate(2, 1));
        assert_eq!(
            integrate(&f, &p, &QuadratureSpec::default()).unwrap().value,
            -3.0
        );
    }

    #[test]
    fn constructor_rejects_non_immersions() {
        let flat =
            CatalogMap::linear(Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap())
                .into_shared();
        assert!(matches!(
            Piece::new(vec![(0.0, 1.0), (0.0, 1.0)], flat, 1),
            Err(Error::ImmersionFailure(_))
        ));
        let id = CatalogMap::Identity { dim: 2 }.into_shared();
        assert!(Piece::new(vec![(0.0, 1.0)], id.clone(), 1).is_err());
        assert!(Piece::new(vec![(0.0, 1.0), (0.0, 1.0)], id, 0).is_err());
    }

    #[test]
    fn degree_mismatch_is_rejected() {
        let eta = KForm::top(2, Coefficient::Constant(1.0));
        let circle =
            Piece::new(vec![(0.0, 1.0)], CatalogMap::circle(1.0).into_shared(), 1).unwrap();
        assert!(matches!(
            integrate(&eta, &circle, &QuadratureSpec::default()),
            Err(Error::InvalidDegree { .. })
        ));
    }
}
