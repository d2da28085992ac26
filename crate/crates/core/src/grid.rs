//! Uniform 1D grids away from the origin, spinor-valued grid functions and
//! dense operators acting on them.
//!
//! Operator layout is grid-major, spinor-minor: component `a` at grid point
//! `j` sits at index `4j + a`. Most operators are sums of Kronecker products
//! `S ⊗ M` of an `n×n` scalar grid matrix `S` and a 4×4 Dirac matrix `M`.
//!
//! Derivatives are second-order central differences with second-order
//! one-sided rows at the two ends. Commutator checks only look at probes
//! supported well inside the grid, where every row is a central stencil.

use serde::{Deserialize, Serialize};

use crate::dirac::{basis, Spinor4};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, I, ZERO};

/// Points that a commutator probe must leave empty next to each boundary.
pub const PROBE_MARGIN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    Position,
    Momentum,
    /// The energy-shift parameter axis; no origin exclusion applies.
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    axis: Axis,
    lower: f64,
    upper: f64,
    n_points: usize,
    exclusion_radius: f64,
}

impl Grid1D {
    pub fn new(axis: Axis, lower: f64, upper: f64, n_points: usize, exclusion_radius: f64) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::GridTooSmall { min: 3, got: n_points });
        }
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::InvalidGrid(format!("bounds [{lower}, {upper}] are not an increasing finite pair")));
        }
        let grid = Grid1D { axis, lower, upper, n_points, exclusion_radius };
        match axis {
            Axis::Energy => {
                if exclusion_radius != 0.0 {
                    return Err(Error::InvalidGrid("energy axis takes no origin exclusion".into()));
                }
            }
            Axis::Position | Axis::Momentum => {
                if !(exclusion_radius > 0.0 && exclusion_radius.is_finite()) {
                    return Err(Error::InvalidGrid(format!("exclusion radius {exclusion_radius} must be positive")));
                }
                if let Some(point) = grid.points().find(|x| x.abs() < exclusion_radius) {
                    return Err(Error::GridContainsOrigin { point, radius: exclusion_radius });
                }
            }
        }
        Ok(grid)
    }

    /// Momentum grid with the default exclusion `|p| ≥ m/4`; massless grids
    /// only need to keep the origin off the lattice.
    pub fn momentum(lower: f64, upper: f64, n_points: usize, mass: f64) -> Result<Self> {
        let radius = if mass > 0.0 { 0.25 * mass } else { default_gap(lower, upper, n_points) };
        Self::new(Axis::Momentum, lower, upper, n_points, radius)
    }

    /// Position grid with the default exclusion `|x| ≥ |x_min|/4`.
    pub fn position(lower: f64, upper: f64, n_points: usize, x_min_mode: f64) -> Result<Self> {
        let radius = if x_min_mode != 0.0 { 0.25 * x_min_mode.abs() } else { default_gap(lower, upper, n_points) };
        Self::new(Axis::Position, lower, upper, n_points, radius)
    }

    pub fn energy(lower: f64, upper: f64, n_points: usize) -> Result<Self> {
        Self::new(Axis::Energy, lower, upper, n_points, 0.0)
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn exclusion_radius(&self) -> f64 {
        self.exclusion_radius
    }

    pub fn spacing(&self) -> f64 {
        (self.upper - self.lower) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.upper
        } else {
            self.lower + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.point(i))
    }

    /// Same bounds, half the spacing.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.axis, self.lower, self.upper, 2 * self.n_points - 1, self.exclusion_radius)
    }

    fn straddles_origin(&self) -> bool {
        self.lower < 0.0 && self.upper > 0.0
    }

    /// Whether index `j` is at least `margin` points away from both ends and
    /// from the origin gap.
    pub fn is_deep_interior(&self, j: usize, margin: usize) -> bool {
        if j < margin || j + margin >= self.n_points {
            return false;
        }
        !self.straddles_origin() || self.point(j).abs() >= self.exclusion_radius + margin as f64 * self.spacing()
    }
}

fn default_gap(lower: f64, upper: f64, n: usize) -> f64 {
    0.5 * (upper - lower) / (n.max(2) - 1) as f64
}

/// A four-spinor at each grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpinorField {
    grid: Grid1D,
    values: Vec<Spinor4>,
}

impl GridSpinorField {
    pub fn new(grid: Grid1D, values: Vec<Spinor4>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        Ok(GridSpinorField { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Spinor4) -> Self {
        let values = grid.points().map(f).collect();
        GridSpinorField { grid, values }
    }

    pub fn zeros(grid: Grid1D) -> Self {
        GridSpinorField { grid, values: vec![Spinor4::ZERO; grid.len()] }
    }

    pub fn from_flat(grid: Grid1D, flat: &[C64]) -> Result<Self> {
        if flat.len() != 4 * grid.len() {
            return Err(Error::DimensionMismatch { expected: 4 * grid.len(), found: flat.len() });
        }
        let values = flat.chunks_exact(4).map(|c| Spinor4([c[0], c[1], c[2], c[3]])).collect();
        Ok(GridSpinorField { grid, values })
    }

    pub fn to_flat(&self) -> Vec<C64> {
        self.values.iter().flat_map(|s| s.0).collect()
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Spinor4] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(Spinor4::max_abs).fold(0.0, f64::max)
    }

    /// `Σ_j |f_j|² Δ` (rectangle rule).
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(Spinor4::norm_sqr).sum::<f64>() * self.grid.spacing()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.iter().enumerate().filter(|(_, s)| **s != Spinor4::ZERO).map(|(j, _)| j)
    }

    /// Fails unless the field vanishes within `margin` points of each end
    /// and of the origin gap.
    pub fn check_interior_support(&self, margin: usize) -> Result<()> {
        match self.support().find(|&j| !self.grid.is_deep_interior(j, margin)) {
            Some(index) => Err(Error::ProbeSupport { index, margin }),
            None => Ok(()),
        }
    }

    pub fn map(&self, f: impl Fn(f64, &Spinor4) -> Spinor4) -> Self {
        let values = self.grid.points().zip(&self.values).map(|(x, s)| f(x, s)).collect();
        GridSpinorField { grid: self.grid, values }
    }
}

/// Smooth compactly supported probe `(1 − r²)⁸ · spinor`, `r = (x − c)/w`.
pub fn bump_probe(grid: Grid1D, center: f64, half_width: f64, spinor: Spinor4) -> GridSpinorField {
    GridSpinorField::from_fn(grid, |x| {
        let r = (x - center) / half_width;
        if r.abs() < 1.0 {
            spinor * (1.0 - r * r).powi(8)
        } else {
            Spinor4::ZERO
        }
    })
}

/// Dense linear operator on spinor fields over one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOperator {
    grid: Grid1D,
    matrix: ComplexMatrix,
}

impl GridOperator {
    pub fn new(grid: Grid1D, matrix: ComplexMatrix) -> Result<Self> {
        let dim = 4 * grid.len();
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: matrix.rows().max(matrix.cols()) });
        }
        Ok(GridOperator { grid, matrix })
    }

    /// `Σ_k scalar_k ⊗ spin_k`.
    pub fn from_kron_terms(grid: Grid1D, terms: &[(&ComplexMatrix, &ComplexMatrix)]) -> Self {
        let dim = 4 * grid.len();
        let mut matrix = ComplexMatrix::zeros(dim, dim);
        for (scalar, spin) in terms {
            for i in 0..scalar.rows() {
                for j in 0..scalar.cols() {
                    let s = scalar[(i, j)];
                    if s == ZERO {
                        continue;
                    }
                    for a in 0..4 {
                        for b in 0..4 {
                            matrix[(4 * i + a, 4 * j + b)] += s * spin[(a, b)];
                        }
                    }
                }
            }
        }
        GridOperator { grid, matrix }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, field: &GridSpinorField) -> Result<GridSpinorField> {
        let out = self.matrix.mul_vec(&field.to_flat())?;
        GridSpinorField::from_flat(self.grid, &out)
    }

    pub fn compose(&self, rhs: &GridOperator) -> Result<GridOperator> {
        Ok(GridOperator { grid: self.grid, matrix: self.matrix.try_mul(&rhs.matrix)? })
    }

    pub fn add(&self, rhs: &GridOperator) -> Result<GridOperator> {
        self.check_same_dim(rhs)?;
        Ok(GridOperator { grid: self.grid, matrix: &self.matrix + &rhs.matrix })
    }

    pub fn sub(&self, rhs: &GridOperator) -> Result<GridOperator> {
        self.check_same_dim(rhs)?;
        Ok(GridOperator { grid: self.grid, matrix: &self.matrix - &rhs.matrix })
    }

    pub fn scale(&self, c: C64) -> GridOperator {
        GridOperator { grid: self.grid, matrix: self.matrix.scale(c) }
    }

    fn check_same_dim(&self, rhs: &GridOperator) -> Result<()> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: rhs.dim() });
        }
        Ok(())
    }

    /// Whether all nonzeros sit in the 4×4 diagonal blocks.
    pub fn is_block_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i / 4 == j / 4 || self.matrix[(i, j)] == ZERO))
    }

    /// `max |A_ij − conj(A_ji)|` over rows and columns at least `margin`
    /// grid points from either end.
    pub fn hermiticity_defect(&self, margin: usize) -> f64 {
        let n = self.grid.len();
        let lo = 4 * margin;
        let hi = 4 * n.saturating_sub(margin);
        let mut worst: f64 = 0.0;
        for i in lo..hi {
            for j in lo..hi {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

/// Diagonal `n×n` matrix of grid coordinates.
pub fn coordinate_matrix(grid: &Grid1D) -> ComplexMatrix {
    let d: Vec<C64> = grid.points().map(|x| C64::new(x, 0.0)).collect();
    ComplexMatrix::from_diagonal(&d)
}

fn diagonal_of(grid: &Grid1D, f: impl Fn(f64) -> C64) -> ComplexMatrix {
    let d: Vec<C64> = grid.points().map(f).collect();
    ComplexMatrix::from_diagonal(&d)
}

/// Real `n×n` first-derivative stencil.
pub fn central_difference_matrix(grid: &Grid1D) -> ComplexMatrix {
    let n = grid.len();
    let c = 1.0 / (2.0 * grid.spacing());
    let mut d = ComplexMatrix::zeros(n, n);
    let mut put = |i: usize, j: usize, v: f64| d[(i, j)] = C64::new(v * c, 0.0);
    put(0, 0, -3.0);
    put(0, 1, 4.0);
    put(0, 2, -1.0);
    for j in 1..n - 1 {
        put(j, j - 1, -1.0);
        put(j, j + 1, 1.0);
    }
    put(n - 1, n - 1, 3.0);
    put(n - 1, n - 2, -4.0);
    put(n - 1, n - 3, 1.0);
    d
}

/// `−i d/dx` as an `n×n` scalar matrix.
pub fn derivative_matrix(grid: &Grid1D) -> ComplexMatrix {
    central_difference_matrix(grid).scale(-I)
}

/// Multiplication by the grid coordinate, `x ⊗ I₄`.
pub fn coordinate_op(grid: &Grid1D) -> GridOperator {
    GridOperator::from_kron_terms(*grid, &[(&coordinate_matrix(grid), &ComplexMatrix::identity(4))])
}

/// `−i d/dx ⊗ I₄`.
pub fn derivative_op(grid: &Grid1D) -> GridOperator {
    GridOperator::from_kron_terms(*grid, &[(&derivative_matrix(grid), &ComplexMatrix::identity(4))])
}

/// Weyl ordering of a product linear in one conjugate variable, `(FG + GF)/2`.
pub fn weyl_symmetrize(f: &GridOperator, g: &GridOperator) -> Result<GridOperator> {
    f.check_same_dim(g)?;
    let fg = f.matrix.try_mul(&g.matrix)?;
    let gf = g.matrix.try_mul(&f.matrix)?;
    Ok(GridOperator { grid: f.grid, matrix: (&fg + &gf).scale_real(0.5) })
}

fn weyl_scalar(f: &ComplexMatrix, g: &ComplexMatrix) -> ComplexMatrix {
    (&(f * g) + &(g * f)).scale_real(0.5)
}

fn require_axis(grid: &Grid1D, axis: Axis) -> Result<()> {
    if grid.axis() != axis {
        return Err(Error::InvalidGrid(format!("expected a {axis:?} grid, got {:?}", grid.axis())));
    }
    Ok(())
}

/// `Ĥ = α₁p + βm`, block diagonal in momentum.
pub fn build_h_momentum(grid_p: &Grid1D, mass: f64) -> Result<GridOperator> {
    require_axis(grid_p, Axis::Momentum)?;
    let b = basis();
    let id = ComplexMatrix::identity(grid_p.len());
    Ok(GridOperator::from_kron_terms(
        *grid_p,
        &[(&coordinate_matrix(grid_p), &b.alpha1), (&id.scale_real(mass), &b.beta)],
    ))
}

/// Relativistic arrival-time operator in the momentum representation,
/// `(1/p)(α₁p + βm)(−i∂_p) + iβm/(2p²)`.
pub fn build_t_dirac_momentum(grid_p: &Grid1D, mass: f64) -> Result<GridOperator> {
    require_axis(grid_p, Axis::Momentum)?;
    let b = basis();
    let d = derivative_matrix(grid_p);
    let m_over_p_d = &diagonal_of(grid_p, |p| C64::new(mass / p, 0.0)) * &d;
    let shift = diagonal_of(grid_p, |p| I * (mass / (2.0 * p * p)));
    Ok(GridOperator::from_kron_terms(*grid_p, &[(&d, &b.alpha1), (&m_over_p_d, &b.beta), (&shift, &b.beta)]))
}

/// `x̂ = i∂_p` on a momentum grid (scalar part).
fn position_on_momentum_grid(grid_p: &Grid1D) -> ComplexMatrix {
    central_difference_matrix(grid_p).scale(I)
}

fn tau_scalar(grid_p: &Grid1D, mass: f64) -> ComplexMatrix {
    let inv_p = diagonal_of(grid_p, |p| C64::new(mass / p, 0.0));
    weyl_scalar(&inv_p, &position_on_momentum_grid(grid_p))
}

/// Nonrelativistic arrival-time operator `τ̂ = m(p̂⁻¹x̂ + x̂p̂⁻¹)/2`, `x̂ = i∂_p`.
pub fn build_tau_op(grid_p: &Grid1D, mass: f64) -> Result<GridOperator> {
    require_axis(grid_p, Axis::Momentum)?;
    let id4 = ComplexMatrix::identity(4);
    let inv_p = GridOperator::from_kron_terms(*grid_p, &[(&diagonal_of(grid_p, |p| C64::new(mass / p, 0.0)), &id4)]);
    let x_hat = GridOperator::from_kron_terms(*grid_p, &[(&position_on_momentum_grid(grid_p), &id4)]);
    weyl_symmetrize(&inv_p, &x_hat)
}

/// `−(α₁x̂ + βτ̂)` assembled from its Weyl-ordered pieces; equals
/// [`build_t_dirac_momentum`] up to `O(h²)` on smooth fields.
pub fn build_t_dirac_weyl(grid_p: &Grid1D, mass: f64) -> Result<GridOperator> {
    require_axis(grid_p, Axis::Momentum)?;
    let b = basis();
    let x = position_on_momentum_grid(grid_p).scale_real(-1.0);
    let tau = tau_scalar(grid_p, mass).scale_real(-1.0);
    Ok(GridOperator::from_kron_terms(*grid_p, &[(&x, &b.alpha1), (&tau, &b.beta)]))
}

fn mass_scalar(grid_x: &Grid1D, tau: f64) -> ComplexMatrix {
    let inv_x = diagonal_of(grid_x, |x| C64::new(tau / x, 0.0));
    weyl_scalar(&inv_x, &derivative_matrix(grid_x))
}

/// Proper-mass operator `m̂ = (τ/2)[p̂(1/x̂) + (1/x̂)p̂]` on a position grid.
pub fn build_mass_op(grid_x: &Grid1D, tau: f64) -> Result<GridOperator> {
    require_axis(grid_x, Axis::Position)?;
    let id4 = ComplexMatrix::identity(4);
    let inv_x = GridOperator::from_kron_terms(*grid_x, &[(&diagonal_of(grid_x, |x| C64::new(tau / x, 0.0)), &id4)]);
    weyl_symmetrize(&inv_x, &derivative_op(grid_x))
}

/// Event-space arrival-time operator `−(α₁x̂ + βτ)` on a position grid
/// (block diagonal).
pub fn build_t_dual_position(grid_x: &Grid1D, tau: f64) -> Result<GridOperator> {
    require_axis(grid_x, Axis::Position)?;
    let b = basis();
    let id = ComplexMatrix::identity(grid_x.len());
    Ok(GridOperator::from_kron_terms(
        *grid_x,
        &[(&coordinate_matrix(grid_x).scale_real(-1.0), &b.alpha1), (&id.scale_real(-tau), &b.beta)],
    ))
}

/// Event-space Hamiltonian `α₁p̂ + βm̂` on a position grid.
pub fn build_h_dual_position(grid_x: &Grid1D, tau: f64) -> Result<GridOperator> {
    require_axis(grid_x, Axis::Position)?;
    let b = basis();
    Ok(GridOperator::from_kron_terms(
        *grid_x,
        &[(&derivative_matrix(grid_x), &b.alpha1), (&mass_scalar(grid_x, tau), &b.beta)],
    ))
}

/// `−(α₁x̂ + βτ)` on a momentum grid with `x̂ = i∂_p`; the generator of the
/// energy-shift equation when the proper time is a c-number.
pub fn build_t_dual_momentum(grid_p: &Grid1D, tau: f64) -> Result<GridOperator> {
    require_axis(grid_p, Axis::Momentum)?;
    let b = basis();
    let id = ComplexMatrix::identity(grid_p.len());
    Ok(GridOperator::from_kron_terms(
        *grid_p,
        &[(&position_on_momentum_grid(grid_p).scale_real(-1.0), &b.alpha1), (&id.scale_real(-tau), &b.beta)],
    ))
}

/// `max_{j ∈ supp} ‖(([A, B] − c) f)_j‖_∞ / ‖f‖_∞`.
///
/// `[A, B]f` is evaluated as `A(Bf) − B(Af)`.
pub fn commutator_residual(a: &GridOperator, b: &GridOperator, expected: C64, probe: &GridSpinorField) -> Result<f64> {
    a.check_same_dim(b)?;
    if probe.grid().len() * 4 != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: probe.grid().len() * 4 });
    }
    probe.check_interior_support(PROBE_MARGIN)?;
    let scale = probe.max_abs();
    if scale == 0.0 {
        return Err(Error::ZeroNormState);
    }
    let f = probe.to_flat();
    let bf = b.matrix.mul_vec(&f)?;
    let af = a.matrix.mul_vec(&f)?;
    let abf = a.matrix.mul_vec(&bf)?;
    let baf = b.matrix.mul_vec(&af)?;
    let worst = probe
        .support()
        .flat_map(|j| 4 * j..4 * j + 4)
        .map(|k| (abf[k] - baf[k] - expected * f[k]).norm())
        .fold(0.0, f64::max);
    Ok(worst / scale)
}

/// Fixed, generic spinor for probes.
pub fn generic_spinor() -> Spinor4 {
    Spinor4([C64::new(1.0, 0.0), C64::new(0.3, 0.5), C64::new(-0.4, 0.2), C64::new(0.1, -0.7)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::fit_order;

    fn pgrid(n: usize) -> Grid1D {
        Grid1D::momentum(0.5, 4.5, n, 1.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert_eq!(Grid1D::momentum(0.5, 4.0, 2, 1.0), Err(Error::GridTooSmall { min: 3, got: 2 }));
        assert!(matches!(Grid1D::momentum(-1.0, 1.0, 3, 1.0), Err(Error::GridContainsOrigin { .. })));
        assert!(Grid1D::momentum(0.1, 4.0, 11, 1.0).is_err());
        // Two-branch grid that skips the origin
        let g = Grid1D::new(Axis::Momentum, -2.05, 2.05, 42, 0.04).unwrap();
        assert!(g.points().all(|p| p.abs() >= 0.04));
        assert!(Grid1D::energy(-1.0, 1.0, 5).unwrap().points().any(|e| e == 0.0));
        let r = pgrid(5).refined().unwrap();
        assert_eq!(r.len(), 9);
        assert!((r.spacing() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derivative_of_constant_vanishes_on_interior() {
        let g = pgrid(21);
        let f = GridSpinorField::from_fn(g, |_| generic_spinor());
        let df = derivative_op(&g).apply(&f).unwrap();
        for s in &df.values()[1..20] {
            assert!(s.max_abs() < 1e-14);
        }
    }

    #[test]
    fn central_difference_error_matches_taylor_remainder() {
        // e^{-ipx} at x = 1, h = 0.01: |D f − f'| ≈ x³h²/6
        let x = 1.0;
        let g = Grid1D::momentum(0.5, 4.5, 401, 1.0).unwrap();
        let plane = |p: f64| Spinor4([(-I * p * x).exp(), ZERO, ZERO, ZERO]);
        let f = GridSpinorField::from_fn(g, plane);
        let df = derivative_op(&g).apply(&f).unwrap();
        let mut worst: f64 = 0.0;
        for (j, p) in g.points().enumerate().skip(1).take(399) {
            // −i d/dp e^{−ipx} = −x e^{−ipx}
            let exact = plane(p) * (-x);
            worst = worst.max((df.values()[j] - exact).max_abs());
        }
        let predicted = x.powi(3) * g.spacing().powi(2) / 6.0;
        assert!((worst / predicted - 1.0).abs() < 0.01, "worst {worst}, predicted {predicted}");
    }

    #[test]
    fn derivative_converges_at_second_order() {
        let mut steps = vec![];
        let mut errs = vec![];
        let mut g = pgrid(51);
        for _ in 0..4 {
            let f = GridSpinorField::from_fn(g, |p| generic_spinor() * (p.sin()));
            let df = derivative_op(&g).apply(&f).unwrap();
            let err = g
                .points()
                .enumerate()
                .skip(1)
                .take(g.len() - 2)
                .map(|(j, p)| (df.values()[j] - generic_spinor() * (-I * p.cos())).max_abs())
                .fold(0.0, f64::max);
            steps.push(g.spacing());
            errs.push(err);
            g = g.refined().unwrap();
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 4.0).abs() <= 0.8, "ratio {ratio}");
        }
        assert!((fit_order(&steps, &errs) - 2.0).abs() < 0.1);
    }

    #[test]
    fn weyl_symmetrize_cases() {
        let g = pgrid(9);
        let x = coordinate_op(&g);
        let d = derivative_op(&g);
        // idempotent case
        let xx = weyl_symmetrize(&x, &x).unwrap();
        assert_eq!(xx, x.compose(&x).unwrap());
        // commuting diagonal case is the entrywise product
        let y = GridOperator::from_kron_terms(g, &[(&diagonal_of(&g, |p| C64::new(1.0 / p, 0.0)), &ComplexMatrix::identity(4))]);
        let xy = weyl_symmetrize(&x, &y).unwrap();
        for i in 0..xy.dim() {
            let want = x.matrix()[(i, i)] * y.matrix()[(i, i)];
            assert!((xy.matrix()[(i, i)] - want).norm() < 1e-15);
        }
        assert!(xy.matrix().is_diagonal());
        // symmetric in its arguments, exactly
        assert_eq!(weyl_symmetrize(&x, &d).unwrap(), weyl_symmetrize(&d, &x).unwrap());
        let other = coordinate_op(&pgrid(5));
        assert!(weyl_symmetrize(&x, &other).is_err());
    }

    #[test]
    fn weyl_xp_is_hermitian_away_from_boundaries() {
        let g = Grid1D::position(0.5, 3.0, 41, 1.0).unwrap();
        let xp = weyl_symmetrize(&coordinate_op(&g), &derivative_op(&g)).unwrap();
        assert!(xp.hermiticity_defect(2) <= 1e-12);
        assert!(xp.hermiticity_defect(0) > 1e-3);
    }

    #[test]
    fn hamiltonian_is_block_diagonal_and_hermitian() {
        let g = pgrid(17);
        let h = build_h_momentum(&g, 1.3).unwrap();
        assert!(h.is_block_diagonal());
        assert_eq!(h.hermiticity_defect(0), 0.0);
        assert!(build_h_momentum(&Grid1D::position(0.5, 1.0, 5, 1.0).unwrap(), 1.0).is_err());
    }

    #[test]
    fn massless_limits_vanish_exactly() {
        let g = pgrid(11);
        let tau = build_tau_op(&g, 0.0).unwrap();
        assert_eq!(tau.matrix().max_abs(), 0.0);
        let gx = Grid1D::position(0.5, 2.0, 11, 1.0).unwrap();
        assert_eq!(build_mass_op(&gx, 0.0).unwrap().matrix().max_abs(), 0.0);
        // m = 0 leaves only α₁(−i∂_p)
        let t = build_t_dirac_momentum(&g, 0.0).unwrap();
        let want = GridOperator::from_kron_terms(g, &[(&derivative_matrix(&g), &basis().alpha1)]);
        assert_eq!(t, want);
    }

    #[test]
    fn direct_and_weyl_arrival_operators_agree_to_second_order() {
        let mut errs = vec![];
        let mut steps = vec![];
        let mut g = pgrid(41);
        for _ in 0..3 {
            let probe = bump_probe(g, 2.5, 1.5, generic_spinor());
            let a = build_t_dirac_momentum(&g, 1.0).unwrap().apply(&probe).unwrap();
            let b = build_t_dirac_weyl(&g, 1.0).unwrap().apply(&probe).unwrap();
            let diff = a.values().iter().zip(b.values()).map(|(x, y)| (*x - *y).max_abs()).fold(0.0, f64::max);
            errs.push(diff);
            steps.push(g.spacing());
            g = g.refined().unwrap();
        }
        let order = fit_order(&steps, &errs);
        assert!((order - 2.0).abs() < 0.3, "order {order}, errs {errs:?}");
    }

    #[test]
    fn self_commutator_residual_is_expected_modulus() {
        let g = pgrid(41);
        let probe = bump_probe(g, 2.5, 1.5, generic_spinor());
        let t = build_t_dirac_momentum(&g, 1.0).unwrap();
        assert_eq!(commutator_residual(&t, &t, ZERO, &probe).unwrap(), 0.0);
        let r = commutator_residual(&t, &t, C64::new(0.0, 1.0), &probe).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn probe_support_precondition() {
        let g = pgrid(41);
        let bad = bump_probe(g, 0.6, 0.5, generic_spinor());
        let t = build_h_momentum(&g, 1.0).unwrap();
        assert!(matches!(commutator_residual(&t, &t, ZERO, &bad), Err(Error::ProbeSupport { .. })));
        let zero = GridSpinorField::zeros(g);
        assert_eq!(commutator_residual(&t, &t, ZERO, &zero), Err(Error::ZeroNormState));
    }

    #[test]
    fn position_momentum_commutator_converges() {
        let mut g = Grid1D::position(0.5, 4.5, 41, 1.0).unwrap();
        let mut steps = vec![];
        let mut errs = vec![];
        for _ in 0..4 {
            let probe = bump_probe(g, 2.5, 1.5, generic_spinor());
            let r = commutator_residual(&coordinate_op(&g), &derivative_op(&g), I, &probe).unwrap();
            steps.push(g.spacing());
            errs.push(r);
            g = g.refined().unwrap();
        }
        assert!((fit_order(&steps, &errs) - 2.0).abs() < 0.3, "{errs:?}");
    }
}
