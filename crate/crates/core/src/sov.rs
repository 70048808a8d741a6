//! Separated variables: the zeroes `z_i` of `B(z) = det Z(z)` and the
//! conjugate `w_i`, together with a numerical certificate of their
//! canonical brackets.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{poly_roots, polymat_det, Field, Jet, Mat, Poly, Ring};
use crate::curve::{genus, SpectralCurve};
use crate::error::{Error, Result};
use crate::lax::{advance_seed, rng_from_seed, slots, LaxMatrix, Shape};
use crate::poisson::PoissonStructure;

/// Roots closer than this (relative to `max(1, |z|)`) count as multiple.
pub const ROOT_SEPARATION: f64 = 1e-6;
/// Accepted `|det(...; xi)| / prod(row norms)`.
pub const XI_MARGIN: f64 = 1e-6;
pub const XI_ATTEMPTS: usize = 8;

type C = Complex64;

/// Which matrix supplied `b` and `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    MBased,
    LBased,
}

/// `b` is the first row without its first entry, `d` the lower-right
/// `(N-1) x (N-1)` block.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSplit<R> {
    pub b: Mat<R>,
    pub d: Mat<R>,
}

impl<R: Ring> BlockSplit<R> {
    pub fn from_matrix(m: &Mat<R>) -> Self {
        let nn = m.rows();
        BlockSplit {
            b: Mat::from_fn(1, nn - 1, |_, c| m[(0, c + 1)].clone()),
            d: Mat::from_fn(nn - 1, nn - 1, |r, c| m[(r + 1, c + 1)].clone()),
        }
    }

    /// Put the first column back.
    pub fn reassemble(&self, first_column: &[R]) -> Mat<R> {
        let nn = self.d.rows() + 1;
        Mat::from_fn(nn, nn, |r, c| match (r, c) {
            (_, 0) => first_column[r].clone(),
            (0, _) => self.b[(0, c - 1)].clone(),
            _ => self.d[(r - 1, c - 1)].clone(),
        })
    }

    /// Rows `b, b d, ..., b d^{count-1}`.
    pub fn krylov_rows(&self, count: usize) -> Vec<Vec<R>> {
        let mut rows = Vec::with_capacity(count);
        let mut current = self.b.clone();
        for _ in 0..count {
            rows.push(current.row(0).to_vec());
            current = current.mul(&self.d);
        }
        rows
    }

    pub fn map<S>(&self, mut f: impl FnMut(&R) -> S) -> BlockSplit<S> {
        BlockSplit { b: self.b.map(&mut f), d: self.d.map(&mut f) }
    }
}

/// `Z = (b; b d; ...; b d^{N-2})`.
pub fn build_z<R: Ring>(split: &BlockSplit<R>) -> Mat<R> {
    let nn = split.d.rows() + 1;
    Mat::from_rows(split.krylov_rows(nn - 1))
}

/// `B(z) = det Z(z)`, checked to have degree exactly `g`.
///
/// Over floats, coefficients above `g` are rounding residue and are
/// dropped; a leading coefficient below `1e-10` of the largest raises
/// [`Error::DegenerateLeading`].
pub fn det_z<F: Field>(lax: &LaxMatrix<F>) -> Result<Poly<F>> {
    let g = genus(lax.order(), lax.pole_degree())?;
    let split = BlockSplit::from_matrix(lax.entries());
    let b = polymat_det(&build_z(&split))?;
    if F::EXACT {
        return match b.degree() {
            Some(d) if d == g => Ok(b),
            found => Err(Error::DegenerateLeading { expected: g, found: found.unwrap_or(0) }),
        };
    }
    let scale = b.max_magnitude();
    let tol = 1e-10 * scale;
    let above = b.coeffs().iter().skip(g + 1).any(|c| c.magnitude() > 1e-8 * scale);
    let found = b.coeffs().iter().rposition(|c| c.magnitude() > tol).unwrap_or(0);
    if above || found != g {
        return Err(Error::DegenerateLeading { expected: g, found });
    }
    Ok(b.truncate(g))
}

/// An admissible `xi` at one root.
#[derive(Clone, Debug, PartialEq)]
pub struct XiChoice {
    pub xi: Vec<C>,
    /// `|det(...; xi)| / prod(row norms)`.
    pub margin: f64,
    pub attempts: usize,
}

fn row_norm(row: &[C]) -> f64 {
    row.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn stack<R: Clone>(rows: &[Vec<R>], last: Vec<R>) -> Mat<R> {
    let mut all = rows.to_vec();
    all.push(last);
    Mat::from_rows(all)
}

/// A row vector `xi` making `det(b; ...; b d^{N-3}; xi)` safely nonzero at
/// `z`. Candidates are random unit vectors from a sequence derived from
/// `seed`.
pub fn choose_xi(split: &BlockSplit<Poly<C>>, z: C, seed: u64) -> Result<XiChoice> {
    let at = split.map(|p| p.eval(&z));
    let nn = at.d.rows() + 1;
    if nn == 2 {
        return Ok(XiChoice { xi: vec![C::new(1.0, 0.0)], margin: 1.0, attempts: 1 });
    }
    let rows = at.krylov_rows(nn - 2);
    let norms: f64 = rows.iter().map(|r| row_norm(r)).product();
    for attempt in 0..XI_ATTEMPTS {
        let mut rng = rng_from_seed(advance_seed(seed, attempt));
        let raw: Vec<C> = (0..nn - 1).map(|_| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let len = row_norm(&raw);
        let xi: Vec<C> = raw.into_iter().map(|c| c / len).collect();
        let den = stack(&rows, xi.clone()).det()?;
        let margin = if norms > 0.0 { den.norm() / norms } else { 0.0 };
        if margin >= XI_MARGIN {
            return Ok(XiChoice { xi, margin, attempts: attempt + 1 });
        }
    }
    Err(Error::GenericityFailure { attempts: XI_ATTEMPTS })
}

/// `w = -det(b; ...; b d^{N-3}; xi d) / det(b; ...; b d^{N-3}; xi)` for a
/// split already evaluated at the root.
pub fn w_formula<R>(at: &BlockSplit<R>, xi: &[R]) -> Result<R>
where
    R: Ring + std::ops::Div<Output = R>,
{
    let nn = at.d.rows() + 1;
    let rows = at.krylov_rows(nn - 2);
    let xi_row = Mat::from_rows(vec![xi.to_vec()]);
    let xi_d = xi_row.mul(&at.d).row(0).to_vec();
    let num = stack(&rows, xi_d).det_laplace()?;
    let den = stack(&rows, xi.to_vec()).det_laplace()?;
    Ok(-(num / den))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorPoint {
    pub z: C,
    pub w: C,
}

/// The `g` separated points and how they were obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Divisor {
    pub order: usize,
    pub pole_degree: usize,
    pub source: Source,
    pub points: Vec<DivisorPoint>,
    /// The `xi` used at each point.
    pub xi: Vec<Vec<C>>,
    /// Smallest pairwise distance between the roots of `B`.
    #[serde(with = "crate::cli::json::unbounded")]
    pub min_separation: f64,
    /// Smallest accepted `xi` margin.
    #[serde(with = "crate::cli::json::unbounded")]
    pub rank_margin: f64,
}

impl Divisor {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Relative curve residual at every point.
    pub fn curve_residuals(&self, curve: &SpectralCurve<C>) -> Vec<f64> {
        self.points.iter().map(|p| curve.relative_residual(&p.w, &p.z)).collect()
    }

    /// The same set of points in a seeded random order.
    pub fn shuffled(&self, seed: u64) -> Divisor {
        let mut rng = rng_from_seed(seed);
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        for i in (1..idx.len()).rev() {
            idx.swap(i, rng.random_range(0..=i));
        }
        Divisor {
            points: idx.iter().map(|&i| self.points[i]).collect(),
            xi: idx.iter().map(|&i| self.xi[i].clone()).collect(),
            ..self.clone()
        }
    }
}

fn min_separation(roots: &[C]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let scale = 1f64.max(roots[i].norm()).max(roots[j].norm());
            best = best.min((roots[i] - roots[j]).norm() / scale);
        }
    }
    best
}

/// Roots of `B` sorted by real then imaginary part so that the output does
/// not depend on the root finder's internal order.
pub fn separated_z(b: &Poly<C>) -> Result<(Vec<C>, f64)> {
    let mut roots = poly_roots(b)?;
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let sep = min_separation(&roots);
    if sep < ROOT_SEPARATION {
        return Err(Error::MultipleRoot { separation: sep });
    }
    Ok((roots, sep))
}

/// Separated variables of `lax`; `b, d` come from `lax` itself, so an
/// m-shape input gives an m-based divisor.
pub fn separate(lax: &LaxMatrix<C>, seed: u64) -> Result<Divisor> {
    let b = det_z(lax)?;
    let (roots, sep) = separated_z(&b)?;
    let split = BlockSplit::from_matrix(lax.entries());
    let mut points = Vec::with_capacity(roots.len());
    let mut xis = Vec::with_capacity(roots.len());
    let mut margin = f64::INFINITY;
    for (i, &z) in roots.iter().enumerate() {
        let choice = choose_xi(&split, z, advance_seed(seed, i + 1))?;
        let at = split.map(|p| p.eval(&z));
        let w = w_formula(&at, &choice.xi)?;
        points.push(DivisorPoint { z, w });
        margin = margin.min(choice.margin);
        xis.push(choice.xi);
    }
    let source = match lax.shape() {
        Shape::M => Source::MBased,
        Shape::L => Source::LBased,
    };
    Ok(Divisor {
        order: lax.order(),
        pole_degree: lax.pole_degree(),
        source,
        points,
        xi: xis,
        min_separation: sep,
        rank_margin: margin,
    })
}

/// Gradients of `z_i` and `w_i` with respect to the m-coordinates, by
/// implicit differentiation of `B(x, z_i) = 0` and the chain rule through
/// the `w` formula.
#[derive(Clone, Debug)]
pub struct SeparatedGradients {
    pub z: Vec<Vec<C>>,
    pub w: Vec<Vec<C>>,
}

fn jet_matrix_at(m: &LaxMatrix<C>, z: &Jet<C>) -> Mat<Jet<C>> {
    let (nn, n) = (m.order(), m.pole_degree());
    let x = m.coordinates();
    let dim = x.len() + 1;
    let mut out: Mat<Jet<C>> = Mat::zeros(nn, nn);
    let mut powers = vec![Jet::constant(C::new(1.0, 0.0))];
    for e in 1..=n {
        powers.push(powers[e - 1].clone() * z.clone());
    }
    for (w, idx) in slots(Shape::M, nn, n).iter().enumerate() {
        let e = idx.exponent(Shape::M, nn, n);
        let coef = Jet::variable(x[w], w, dim);
        out[(idx.row, idx.col)] = out[(idx.row, idx.col)].clone() + coef * powers[e].clone();
    }
    out
}

pub fn separated_gradients(m: &LaxMatrix<C>, divisor: &Divisor) -> Result<SeparatedGradients> {
    if m.shape() != Shape::M {
        return Err(Error::Domain("bracket gradients are taken with respect to m-coordinates".into()));
    }
    let d = m.coordinates().len();
    let mut gz = Vec::with_capacity(divisor.len());
    let mut gw = Vec::with_capacity(divisor.len());
    for (p, xi) in divisor.points.iter().zip(&divisor.xi) {
        let zj = Jet::variable(p.z, d, d + 1);
        let split = BlockSplit::from_matrix(&jet_matrix_at(m, &zj));
        let b = build_z(&split).det_laplace()?;
        let bz = b.partial(d);
        if bz.norm() == 0.0 {
            return Err(Error::MultipleRoot { separation: 0.0 });
        }
        let dz: Vec<C> = (0..d).map(|u| -b.partial(u) / bz).collect();
        let xi_j: Vec<Jet<C>> = xi.iter().map(|c| Jet::constant(*c)).collect();
        let a = w_formula(&split, &xi_j)?;
        let az = a.partial(d);
        let dw: Vec<C> = (0..d).map(|u| a.partial(u) + az * dz[u]).collect();
        gz.push(dz);
        gw.push(dw);
    }
    Ok(SeparatedGradients { z: gz, w: gw })
}

/// Bracket matrices of the separated variables and their residuals.
#[derive(Clone, Debug, Serialize)]
pub struct BracketReport {
    pub zz: Vec<Vec<C>>,
    pub zw: Vec<Vec<C>>,
    pub ww: Vec<Vec<C>>,
    /// `max |{z_i, z_j}|`.
    pub r_zz: f64,
    /// `max |{z_i, w_j} - delta_ij z_i| / |z_i|`.
    pub r_zw: f64,
    /// `max |{z_i, w_j} + delta_ij z_i| / |z_i|`. With the bracket of `m`
    /// as normalized here, this is the one that vanishes.
    pub r_zw_opposite: f64,
    /// `max |{w_i, w_j}|` divided by the sum of the magnitudes of the terms
    /// in the contraction.
    pub r_ww: f64,
    pub r_ww_absolute: f64,
}

/// Brackets of the m-based separated variables of `m`.
pub fn canonical_bracket_check(p: &PoissonStructure, m: &LaxMatrix<C>, seed: u64) -> Result<(Divisor, BracketReport)> {
    let divisor = separate(m, seed)?;
    let report = bracket_report(p, m, &divisor)?;
    Ok((divisor, report))
}

pub fn bracket_report(p: &PoissonStructure, m: &LaxMatrix<C>, divisor: &Divisor) -> Result<BracketReport> {
    let grads = separated_gradients(m, divisor)?;
    let x = m.coordinates();
    let g = divisor.len();
    let zz = Mat::from_fn(g, g, |i, j| p.contract(&x, &grads.z[i], &grads.z[j]));
    let zw = Mat::from_fn(g, g, |i, j| p.contract(&x, &grads.z[i], &grads.w[j]));
    let ww = Mat::from_fn(g, g, |i, j| p.contract(&x, &grads.w[i], &grads.w[j]));
    let mut r_zw: f64 = 0.0;
    let mut r_zw_opposite: f64 = 0.0;
    let mut r_ww: f64 = 0.0;
    for i in 0..g {
        let zi = divisor.points[i].z;
        for j in 0..g {
            let target = if i == j { zi } else { C::new(0.0, 0.0) };
            let size = zi.norm().max(f64::MIN_POSITIVE);
            r_zw = r_zw.max((zw[(i, j)] - target).norm() / size);
            r_zw_opposite = r_zw_opposite.max((zw[(i, j)] + target).norm() / size);
            let scale = p.contract_magnitude(&x, &grads.w[i], &grads.w[j]).max(f64::MIN_POSITIVE);
            r_ww = r_ww.max(ww[(i, j)].norm() / scale);
        }
    }
    Ok(BracketReport {
        r_zz: zz.max_magnitude(),
        r_zw,
        r_zw_opposite,
        r_ww,
        r_ww_absolute: ww.max_magnitude(),
        zz: zz.to_rows(),
        zw: zw.to_rows(),
        ww: ww.to_rows(),
    })
}

/// Newton refinement of a simple root of `b` from a nearby start.
fn newton(b: &Poly<C>, mut z: C) -> C {
    let db = b.derivative();
    for _ in 0..50 {
        let step = b.eval(&z) / db.eval(&z);
        z -= step;
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Largest relative disagreement between the implicit gradients and
/// Richardson-extrapolated central differences with base step `h`.
pub fn gradient_fd_check(m: &LaxMatrix<C>, divisor: &Divisor, h: f64) -> Result<f64> {
    let grads = separated_gradients(m, divisor)?;
    let (nn, n) = (m.order(), m.pole_degree());
    let x = m.coordinates();
    let eval = |u: usize, step: f64| -> Result<Vec<(C, C)>> {
        let mut y = x.clone();
        y[u] += step;
        let mm = LaxMatrix::from_coordinates(nn, n, Shape::M, &y, None)?;
        let b = det_z(&mm)?;
        let split = BlockSplit::from_matrix(mm.entries());
        divisor
            .points
            .iter()
            .zip(&divisor.xi)
            .map(|(p, xi)| {
                let z = newton(&b, p.z);
                let w = w_formula(&split.map(|q| q.eval(&z)), xi)?;
                Ok((z, w))
            })
            .collect()
    };
    let mut scale: f64 = 0.0;
    for g in grads.z.iter().chain(&grads.w) {
        for v in g {
            scale = scale.max(v.norm());
        }
    }
    let mut worst: f64 = 0.0;
    for u in 0..x.len() {
        let central = |step: f64| -> Result<Vec<(C, C)>> {
            let plus = eval(u, step)?;
            let minus = eval(u, -step)?;
            Ok(plus.iter().zip(&minus).map(|(a, b)| ((a.0 - b.0) / (2.0 * step), (a.1 - b.1) / (2.0 * step))).collect())
        };
        let coarse = central(h)?;
        let fine = central(h / 2.0)?;
        for (i, (c, f)) in coarse.iter().zip(&fine).enumerate() {
            let rz = (f.0 * 4.0 - c.0) / 3.0;
            let rw = (f.1 * 4.0 - c.1) / 3.0;
            worst = worst.max((rz - grads.z[i][u]).norm()).max((rw - grads.w[i][u]).norm());
        }
    }
    Ok(worst / scale.max(f64::MIN_POSITIVE))
}
