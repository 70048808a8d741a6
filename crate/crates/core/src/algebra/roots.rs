//! Simultaneous root finding for complex polynomials.
//!
//! Aberth-Ehrlich iteration from deterministic starting points on a circle,
//! followed by Newton polishing. If the iteration stalls, the eigenvalues of
//! the companion matrix are used instead. Every returned root is checked
//! against a backward-error bound.

use num_complex::Complex64;

use super::poly::Poly;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    pub max_iterations: usize,
    /// Accepted backward error `|p(r)| / sum |c_k| |r|^k`.
    pub rtol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { max_iterations: 500, rtol: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootMethod {
    Aberth,
    Companion,
}

#[derive(Clone, Debug)]
pub struct RootReport {
    pub roots: Vec<Complex64>,
    pub iterations: usize,
    pub method: RootMethod,
    /// Largest backward error over the returned roots.
    pub backward_error: f64,
}

pub fn poly_roots(p: &Poly<Complex64>) -> Result<Vec<Complex64>> {
    poly_roots_with(p, RootOptions::default()).map(|r| r.roots)
}

pub fn poly_roots_with(p: &Poly<Complex64>, opts: RootOptions) -> Result<RootReport> {
    let scale = p.max_magnitude();
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::ZeroPolynomial);
    }
    let degree = p.degree().unwrap_or(0);
    if degree == 0 {
        return Err(Error::Domain("root finding needs degree >= 1".into()));
    }
    if p.leading().norm() <= 1e-14 * scale {
        return Err(Error::Domain(format!(
            "leading coefficient {:e} is below tolerance relative to {scale:e}",
            p.leading().norm()
        )));
    }
    let zeros_at_origin = p.coeffs().iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = Poly::new(p.coeffs()[zeros_at_origin..].to_vec());
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    if reduced.degree() == Some(0) {
        return Ok(RootReport { roots, iterations: 0, method: RootMethod::Aberth, backward_error: 0.0 });
    }

    let (found, iterations, method) = match aberth(&reduced, opts.max_iterations) {
        Some((r, it)) => (r, it, RootMethod::Aberth),
        None => (companion_roots(&reduced)?, opts.max_iterations, RootMethod::Companion),
    };
    let found: Vec<Complex64> = found.into_iter().map(|r| polish(&reduced, r)).collect();
    let worst = found.iter().map(|&r| backward_error(&reduced, r)).fold(0.0, f64::max);
    if !worst.is_finite() || worst > opts.rtol {
        if method == RootMethod::Aberth {
            let alt: Vec<Complex64> =
                companion_roots(&reduced)?.into_iter().map(|r| polish(&reduced, r)).collect();
            let alt_err = alt.iter().map(|&r| backward_error(&reduced, r)).fold(0.0, f64::max);
            if alt_err <= opts.rtol {
                roots.extend(alt);
                return Ok(RootReport { roots, iterations, method: RootMethod::Companion, backward_error: alt_err });
            }
        }
        return Err(Error::NoConvergence { iterations });
    }
    roots.extend(found);
    Ok(RootReport { roots, iterations, method, backward_error: worst })
}

fn eval_with_derivative(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut val = Complex64::new(0.0, 0.0);
    let mut der = Complex64::new(0.0, 0.0);
    for c in p.iter().rev() {
        der = der * z + val;
        val = val * z + c;
    }
    (val, der)
}

/// `|p(r)| / sum |c_k| |r|^k`.
pub fn backward_error(p: &Poly<Complex64>, r: Complex64) -> f64 {
    let (val, _) = eval_with_derivative(p.coeffs(), r);
    let rn = r.norm();
    let denom = p.coeffs().iter().rev().fold(0.0, |acc, c| acc * rn + c.norm());
    if denom == 0.0 {
        0.0
    } else {
        val.norm() / denom
    }
}

fn aberth(p: &Poly<Complex64>, max_iterations: usize) -> Option<(Vec<Complex64>, usize)> {
    let coeffs = p.coeffs();
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    // Geometric mean of the root moduli gives a well-centred start circle.
    let radius = monic[0].norm().powf(1.0 / d as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / d as f64 + 0.4))
        .collect();
    let mut done = vec![false; d];
    for it in 1..=max_iterations {
        let mut all_done = true;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (val, der) = eval_with_derivative(&monic, z[i]);
            if val.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = val / der;
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = z[i] - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        1.0 / diff
                    }
                })
                .sum();
            let offset = ratio / (1.0 - ratio * repulsion);
            if !offset.re.is_finite() || !offset.im.is_finite() {
                return None;
            }
            z[i] -= offset;
            if offset.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(1e-300) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return Some((z, it));
        }
    }
    let accepted = z.iter().all(|&r| backward_error(p, r) <= 1e-12);
    accepted.then_some((z, max_iterations))
}

fn polish(p: &Poly<Complex64>, mut r: Complex64) -> Complex64 {
    for _ in 0..3 {
        let (val, der) = eval_with_derivative(p.coeffs(), r);
        if der.norm() == 0.0 {
            break;
        }
        let step = val / der;
        let cand = r - step;
        if !cand.re.is_finite() || !cand.im.is_finite() || backward_error(p, cand) > backward_error(p, r) {
            break;
        }
        r = cand;
    }
    r
}

fn companion_roots(p: &Poly<Complex64>) -> Result<Vec<Complex64>> {
    let coeffs = p.coeffs();
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let m = nalgebra::DMatrix::<Complex64>::from_fn(d, d, |r, c| {
        if r == 0 {
            -coeffs[d - 1 - c] / lead
        } else if r == c + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)
        .ok_or(Error::NoConvergence { iterations: 10_000 })?;
    let eig = schur.eigenvalues().ok_or(Error::NoConvergence { iterations: 10_000 })?;
    Ok(eig.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn difference_of_squares() {
        let p = Poly::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let r = sorted(poly_roots(&p).unwrap());
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn triple_root_at_origin() {
        let p = Poly::monomial(c(1.0, 0.0), 3);
        assert_eq!(poly_roots(&p).unwrap(), vec![c(0.0, 0.0); 3]);
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        let p = Poly::new(vec![c(0.0, 0.0)]);
        assert_eq!(poly_roots(&p), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn companion_fallback_agrees() {
        let planted = [c(0.5, 0.1), c(-1.2, 0.7), c(2.0, -0.3)];
        let p = Poly::from_roots(&planted);
        let r = sorted(companion_roots(&p).unwrap());
        let want = sorted(planted.to_vec());
        for (a, b) in r.iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn deterministic() {
        let p = Poly::new(vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.3, 0.1), c(1.0, 0.0)]);
        assert_eq!(poly_roots(&p).unwrap(), poly_roots(&p).unwrap());
    }
}
