//! Uniform interval/box grids with homogeneous Dirichlet data, the
//! standard 3-point/5-point Laplacian, and the weight fields used by the
//! verification suites.

use crate::error::{Error, Result};

/// Interior nodes of a uniform grid on an interval (`dim = 1`) or a
/// rectangle (`dim = 2`). Boundary nodes carry the value 0 and are not
/// stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceGrid {
    dim: usize,
    lower: [f64; 2],
    upper: [f64; 2],
    h: f64,
    nodes: [usize; 2],
}

impl SpaceGrid {
    pub fn new(dim: usize, lower: [f64; 2], upper: [f64; 2], h: f64) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::Domain(format!("only 1D and 2D grids are supported, got {dim}")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Domain(format!("mesh width must be positive, got {h}")));
        }
        let mut nodes = [1usize; 2];
        for ax in 0..dim {
            let len = upper[ax] - lower[ax];
            if !(len.is_finite() && len > 0.0) {
                return Err(Error::Domain(format!("empty extent on axis {ax}")));
            }
            let cells = (len / h).round();
            if cells < 2.0 || (cells * h - len).abs() > 1e-9 * len {
                return Err(Error::Domain(format!(
                    "extent {len} on axis {ax} is not a multiple (>= 2) of h = {h}"
                )));
            }
            nodes[ax] = cells as usize - 1;
        }
        Ok(Self {
            dim,
            lower,
            upper,
            h,
            nodes,
        })
    }

    /// `(a, b)` with mesh width `h`.
    pub fn interval(a: f64, b: f64, h: f64) -> Result<Self> {
        Self::new(1, [a, 0.0], [b, 0.0], h)
    }

    /// The box `[-radius, radius]^dim`.
    pub fn centered(radius: f64, h: f64, dim: usize) -> Result<Self> {
        Self::new(dim, [-radius; 2], [radius; 2], h)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn lower(&self) -> [f64; 2] {
        self.lower
    }

    pub fn upper(&self) -> [f64; 2] {
        self.upper
    }

    /// Interior node counts per axis.
    pub fn nodes_per_axis(&self) -> [usize; 2] {
        self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes[0] * if self.dim == 2 { self.nodes[1] } else { 1 }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Coordinates of interior node `idx` (x varies fastest).
    pub fn coords(&self, idx: usize) -> [f64; 2] {
        let i = idx % self.nodes[0];
        let k = idx / self.nodes[0];
        let x = self.lower[0] + (i + 1) as f64 * self.h;
        let y = if self.dim == 2 {
            self.lower[1] + (k + 1) as f64 * self.h
        } else {
            0.0
        };
        [x, y]
    }

    pub fn norm_sq(&self, idx: usize) -> f64 {
        let c = self.coords(idx);
        c[0] * c[0] + c[1] * c[1]
    }

    /// Whether `idx` sits next to the boundary.
    pub fn touches_boundary(&self, idx: usize) -> bool {
        let i = idx % self.nodes[0];
        let k = idx / self.nodes[0];
        let edge_x = i == 0 || i + 1 == self.nodes[0];
        let edge_y = self.dim == 2 && (k == 0 || k + 1 == self.nodes[1]);
        edge_x || edge_y
    }

    /// Same extent with half the mesh width.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.dim, self.lower, self.upper, 0.5 * self.h)
    }
}

/// Values at the interior nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: SpaceGrid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: SpaceGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} values for a grid with {} interior nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite field value at node {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: SpaceGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Evaluates `f` at every interior node.
    pub fn from_fn(grid: SpaceGrid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        check_grid(&self.grid, &other.grid)?;
        Ok(Field {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn check_grid(a: &SpaceGrid, b: &SpaceGrid) -> Result<()> {
    if a != b {
        return Err(Error::Shape("fields live on different grids".into()));
    }
    Ok(())
}

/// The Dirichlet Laplacian `Delta_h` on a [`SpaceGrid`].
#[derive(Debug, Clone, Copy)]
pub struct Laplacian {
    grid: SpaceGrid,
}

/// Builds the 3-point (1D) or 5-point (2D) Dirichlet stencil.
pub fn build_laplacian(grid: &SpaceGrid) -> Result<Laplacian> {
    if grid.is_empty() {
        return Err(Error::Domain("grid has no interior nodes".into()));
    }
    Ok(Laplacian { grid: *grid })
}

impl Laplacian {
    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    /// `out = Delta_h u`.
    pub fn apply_into(&self, u: &[f64], out: &mut [f64]) {
        let [nx, ny] = self.grid.nodes;
        let inv_h2 = 1.0 / (self.grid.h * self.grid.h);
        if self.grid.dim == 1 {
            for i in 0..nx {
                let left = if i > 0 { u[i - 1] } else { 0.0 };
                let right = if i + 1 < nx { u[i + 1] } else { 0.0 };
                out[i] = (left - 2.0 * u[i] + right) * inv_h2;
            }
        } else {
            for k in 0..ny {
                for i in 0..nx {
                    let idx = k * nx + i;
                    let w = if i > 0 { u[idx - 1] } else { 0.0 };
                    let e = if i + 1 < nx { u[idx + 1] } else { 0.0 };
                    let s = if k > 0 { u[idx - nx] } else { 0.0 };
                    let n = if k + 1 < ny { u[idx + nx] } else { 0.0 };
                    out[idx] = (w + e + s + n - 4.0 * u[idx]) * inv_h2;
                }
            }
        }
    }

    pub fn apply(&self, u: &Field) -> Result<Field> {
        check_grid(&self.grid, &u.grid)?;
        let mut out = vec![0.0; u.values.len()];
        self.apply_into(&u.values, &mut out);
        Ok(Field {
            grid: self.grid,
            values: out,
        })
    }

    /// Solves `(diag(d) - Delta_h) x = rhs` for a positive diagonal `d`
    /// (or `d = 0`). The matrix is symmetric positive definite.
    pub fn solve_shifted(&self, d: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
        if self.grid.dim == 1 {
            Ok(self.thomas(d, rhs))
        } else {
            self.conjugate_gradient(d, rhs)
        }
    }

    fn thomas(&self, d: &[f64], rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let inv_h2 = 1.0 / (self.grid.h * self.grid.h);
        let off = -inv_h2;
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut denom = d[0] + 2.0 * inv_h2;
        c[0] = off / denom;
        x[0] = rhs[0] / denom;
        for i in 1..n {
            denom = d[i] + 2.0 * inv_h2 - off * c[i - 1];
            c[i] = off / denom;
            x[i] = (rhs[i] - off * x[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    }

    fn conjugate_gradient(&self, d: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
        let n = rhs.len();
        let inv_h2 = 1.0 / (self.grid.h * self.grid.h);
        let apply = |x: &[f64], out: &mut [f64]| {
            self.apply_into(x, out);
            for i in 0..n {
                out[i] = d[i] * x[i] - out[i];
            }
        };
        let precond: Vec<f64> = d.iter().map(|di| 1.0 / (di + 4.0 * inv_h2)).collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let bnorm = dot(rhs, rhs).sqrt();
        let mut x = vec![0.0; n];
        if bnorm == 0.0 {
            return Ok(x);
        }
        let mut r = rhs.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&precond).map(|(a, p)| a * p).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut ap = vec![0.0; n];
        for _ in 0..(20 * n).max(100) {
            apply(&p, &mut ap);
            let step = rz / dot(&p, &ap);
            for i in 0..n {
                x[i] += step * p[i];
                r[i] -= step * ap[i];
            }
            if dot(&r, &r).sqrt() <= 1e-14 * bnorm {
                return Ok(x);
            }
            for i in 0..n {
                z[i] = r[i] * precond[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::Internal("conjugate gradient did not converge".into()))
    }
}

/// Which weight a [`WeightField`] carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    /// Discrete solution of `-Delta zeta = 1`.
    Torsion,
    /// `[1 - |x|^2 / n^2]_+`.
    Bump { n: f64 },
    /// Smooth cutoff, 1 on `|x| <= n - 1`, 0 on `|x| >= n`.
    Cutoff { n: f64 },
    /// `exp(-|x|^2)`.
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    kind: WeightKind,
    field: Field,
}

impl WeightField {
    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn values(&self) -> &[f64] {
        &self.field.values
    }
}

/// Discrete torsion function: `-Delta_h zeta = 1`, zero on the boundary.
pub fn torsion_zeta(grid: &SpaceGrid) -> Result<WeightField> {
    let lap = build_laplacian(grid)?;
    let zeros = vec![0.0; grid.len()];
    let ones = vec![1.0; grid.len()];
    let values = lap.solve_shifted(&zeros, &ones)?;
    if values.iter().any(|&z| !(z > 0.0)) {
        return Err(Error::Internal("torsion function is not positive".into()));
    }
    Ok(WeightField {
        kind: WeightKind::Torsion,
        field: Field { grid: *grid, values },
    })
}

/// `[1 - |x|^2/n^2]_+`.
pub fn bump_weight(n: f64, grid: &SpaceGrid) -> Result<WeightField> {
    check_radius(n)?;
    let field = Field::from_fn(*grid, |x| (1.0 - (x[0] * x[0] + x[1] * x[1]) / (n * n)).max(0.0));
    Ok(WeightField {
        kind: WeightKind::Bump { n },
        field,
    })
}

/// Cutoff `psi_n`: 1 on `|x| <= n - 1`, 0 on `|x| >= n`, quintic ramp between.
pub fn cutoff(n: f64, grid: &SpaceGrid) -> Result<WeightField> {
    check_radius(n)?;
    let field = Field::from_fn(*grid, |x| plateau((x[0] * x[0] + x[1] * x[1]).sqrt(), n - 1.0, n));
    Ok(WeightField {
        kind: WeightKind::Cutoff { n },
        field,
    })
}

/// `exp(-|x|^2)`.
pub fn gaussian(grid: &SpaceGrid) -> WeightField {
    WeightField {
        kind: WeightKind::Gaussian,
        field: Field::from_fn(*grid, |x| (-(x[0] * x[0] + x[1] * x[1])).exp()),
    }
}

fn check_radius(n: f64) -> Result<()> {
    if !(n.is_finite() && n >= 1.0) {
        return Err(Error::Domain(format!("weight radius must be at least 1, got {n}")));
    }
    Ok(())
}

/// Radial plateau: 1 for `r <= inner`, 0 for `r >= outer`, joined by the
/// `C^2` quintic `1 - (10 s^3 - 15 s^4 + 6 s^5)`.
pub fn plateau(r: f64, inner: f64, outer: f64) -> f64 {
    if r <= inner {
        1.0
    } else if r >= outer {
        0.0
    } else {
        let s = (r - inner) / (outer - inner);
        1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }
}

/// Exact Laplacian of the radial [`plateau`] in dimension `dim`.
pub fn plateau_laplacian(r: f64, inner: f64, outer: f64, dim: usize) -> f64 {
    if r <= inner || r >= outer {
        return 0.0;
    }
    let w = outer - inner;
    let s = (r - inner) / w;
    let d1 = -30.0 * s * s * (1.0 - s) * (1.0 - s) / w;
    let d2 = -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (w * w);
    d2 + (dim as f64 - 1.0) * d1 / r
}

/// `sum |u| w h^N`.
pub fn weighted_l1(u: &Field, w: &WeightField) -> Result<f64> {
    check_grid(&u.grid, &w.field.grid)?;
    Ok(u.values
        .iter()
        .zip(&w.field.values)
        .map(|(a, b)| a.abs() * b)
        .sum::<f64>()
        * u.grid.cell_volume())
}

/// Discrete `L^q` norm; `q = inf` is the max norm.
pub fn lq_norm(u: &Field, q: f64) -> Result<f64> {
    if q.is_infinite() && q > 0.0 {
        return Ok(u.max_abs());
    }
    if !(q >= 1.0) {
        return Err(Error::Domain(format!("norm exponent must be in [1, inf], got {q}")));
    }
    let vol = u.grid.cell_volume();
    if q == 1.0 {
        return Ok(u.values.iter().map(|v| v.abs()).sum::<f64>() * vol);
    }
    if q == 2.0 {
        return Ok((u.values.iter().map(|v| v * v).sum::<f64>() * vol).sqrt());
    }
    Ok((u.values.iter().map(|v| v.abs().powf(q)).sum::<f64>() * vol).powf(1.0 / q))
}

/// `sum u h^N`.
pub fn mass(u: &Field) -> f64 {
    u.values.iter().sum::<f64>() * u.grid.cell_volume()
}

/// `sum u v h^N`.
pub fn inner(u: &Field, v: &Field) -> Result<f64> {
    check_grid(&u.grid, &v.grid)?;
    Ok(u.values.iter().zip(&v.values).map(|(a, b)| a * b).sum::<f64>() * u.grid.cell_volume())
}
