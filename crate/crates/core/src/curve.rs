//! Spectral curves `w^N + t_1(z) w^{N-1} + ... + t_N(z) = 0`.

use serde::{Deserialize, Serialize};

use crate::algebra::{BiPoly, Field, Poly};
use crate::error::{Error, Result};

/// `(N - 1)(Nn - 2) / 2`.
pub fn genus(order: usize, pole_degree: usize) -> Result<usize> {
    check_orders(order, pole_degree)?;
    Ok((order - 1) * (order * pole_degree - 2) / 2)
}

pub(crate) fn check_orders(order: usize, pole_degree: usize) -> Result<()> {
    if order < 2 {
        return Err(Error::Domain(format!("matrix order N = {order} must be at least 2")));
    }
    if pole_degree < 1 {
        return Err(Error::Domain("degree parameter n must be at least 1".into()));
    }
    Ok(())
}

/// Index `(l, k)` of the holomorphic differential `z^k w^l dz / r_w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DifferentialIndex {
    pub l: usize,
    pub k: usize,
}

/// All `(l, k)` with `0 <= l <= N - 2` and `0 <= k < (N - l - 1) n - 1`, in
/// lexicographic order.
pub fn differential_index_set(order: usize, pole_degree: usize) -> Result<Vec<DifferentialIndex>> {
    check_orders(order, pole_degree)?;
    let mut out = Vec::new();
    for l in 0..order - 1 {
        let bound = (order - l - 1) * pole_degree;
        for k in 0..bound.saturating_sub(1) {
            out.push(DifferentialIndex { l, k });
        }
    }
    Ok(out)
}

/// The curve is stored through its coefficient polynomials; the bivariate
/// form is produced on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCurve<F> {
    order: usize,
    pole_degree: usize,
    t: Vec<Poly<F>>,
}

impl<F: Field> SpectralCurve<F> {
    /// `t[k]` is `t_{k+1}`. Enforces `deg t_k <= kn - 1` and
    /// `deg t_N = Nn - 1`.
    pub fn new(order: usize, pole_degree: usize, t: Vec<Poly<F>>) -> Result<Self> {
        check_orders(order, pole_degree)?;
        if t.len() != order {
            return Err(Error::DimensionMismatch { expected: order, got: t.len() });
        }
        for (idx, tk) in t.iter().enumerate() {
            let k = idx + 1;
            let bound = k * pole_degree - 1;
            if let Some(d) = tk.degree() {
                if d > bound {
                    return Err(Error::DegreeViolation { k, degree: d, bound });
                }
            }
        }
        let top = order * pole_degree - 1;
        match t[order - 1].degree() {
            Some(d) if d == top => {}
            found => {
                return Err(Error::Domain(format!(
                    "t_N must have degree exactly {top}, found {}",
                    found.map_or("-inf".to_string(), |d| d.to_string())
                )))
            }
        }
        Ok(SpectralCurve { order, pole_degree, t })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn pole_degree(&self) -> usize {
        self.pole_degree
    }

    pub fn genus(&self) -> usize {
        (self.order - 1) * (self.order * self.pole_degree - 2) / 2
    }

    /// `t_k` for `1 <= k <= N`.
    pub fn t(&self, k: usize) -> &Poly<F> {
        &self.t[k - 1]
    }

    pub fn coefficients(&self) -> &[Poly<F>] {
        &self.t
    }

    /// Coefficient of `z^{kn - 1}` in `t_k`.
    pub fn top_coefficient(&self, k: usize) -> F {
        self.t(k).coeff(k * self.pole_degree - 1)
    }

    /// `r(w, z)`.
    pub fn residual(&self, w: &F, z: &F) -> F {
        let mut acc = F::one();
        for tk in &self.t {
            acc = acc * w.clone() + tk.eval(z);
        }
        acc
    }

    /// Sum of the magnitudes of the monomials of `r` at `(w, z)`, plus one.
    pub fn residual_scale(&self, w: &F, z: &F) -> f64 {
        let aw = w.magnitude();
        let mut s = 1.0 + aw.powi(self.order as i32);
        for (idx, tk) in self.t.iter().enumerate() {
            let k = idx + 1;
            s += tk.eval(z).magnitude() * aw.powi((self.order - k) as i32);
        }
        s
    }

    pub fn relative_residual(&self, w: &F, z: &F) -> f64 {
        self.residual(w, z).magnitude() / self.residual_scale(w, z)
    }

    pub fn on_curve(&self, w: &F, z: &F, tol: f64) -> bool {
        self.relative_residual(w, z) <= tol
    }

    /// `r(w, z)` as a bivariate polynomial, `w` as the first variable.
    pub fn to_bipoly(&self) -> BiPoly<F> {
        let mut r = BiPoly::monomial(F::one(), self.order, 0);
        for (idx, tk) in self.t.iter().enumerate() {
            let p = self.order - idx - 1;
            for (e, c) in tk.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    r = r + BiPoly::monomial(c.clone(), p, e);
                }
            }
        }
        r
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> SpectralCurve<G> {
        SpectralCurve {
            order: self.order,
            pole_degree: self.pole_degree,
            t: self.t.iter().map(|p| p.map(&f)).collect(),
        }
    }
}
