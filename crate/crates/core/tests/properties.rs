use num_complex::Complex64;
use proptest::prelude::*;
use specjac::algebra::{BiPoly, LinearFactor, MPoly, Mat, Poly, Rational, Ring, poly_roots};
use specjac::cli::json::{curve_from_json, curve_to_json, lax_from_json, lax_to_json};
use specjac::curve::genus;
use specjac::euler::{generator_degrees, RingId};
use specjac::lax::{char_poly_t, gauge_fix_l, sample_m};
use specjac::poisson::{
    apply_d, d_degree, jacobi_failures, m_grade, random_triples, structure_constants,
};
use specjac::sov::{choose_xi, separate, w_formula, BlockSplit, Divisor};

type C = Complex64;

fn rat(v: i64) -> Rational {
    Rational::from_i64(v)
}

fn small() -> impl Strategy<Value = i64> {
    -9i64..=9
}

fn poly_strategy() -> impl Strategy<Value = Poly<Rational>> {
    prop::collection::vec(small(), 0..5).prop_map(|c| Poly::new(c.into_iter().map(rat).collect()))
}

fn mat_strategy(n: usize) -> impl Strategy<Value = Mat<Rational>> {
    prop::collection::vec(small(), n * n).prop_map(move |v| Mat::from_fn(n, n, |r, c| rat(v[r * n + c])))
}

fn bipoly_strategy() -> impl Strategy<Value = BiPoly<Rational>> {
    prop::collection::vec(prop::collection::vec(small(), 1..4), 1..4)
        .prop_map(|g| BiPoly::from_grid(g.into_iter().map(|r| r.into_iter().map(rat).collect()).collect()))
}

fn shape_strategy() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=4, 1usize..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn poly_ring_axioms(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        prop_assert_eq!(a.clone() * Poly::one(), a.clone());
        prop_assert!((a.clone() - a).is_zero());
    }

    #[test]
    fn poly_division_reconstructs(a in poly_strategy(), d in poly_strategy()) {
        prop_assume!(!d.is_zero());
        let (q, r) = a.div_rem(&d).unwrap();
        prop_assert_eq!(q * d.clone() + r.clone(), a);
        prop_assert!(r.is_zero() || r.degree() < d.degree());
    }

    #[test]
    fn det_is_multilinear_in_rows(m in mat_strategy(3), row in prop::collection::vec(small(), 3), k in small()) {
        let replaced = |v: &dyn Fn(usize) -> Rational| {
            Mat::from_fn(3, 3, |r, c| if r == 1 { v(c) } else { m[(r, c)].clone() })
        };
        let base = m.det().unwrap();
        let other = replaced(&|c| rat(row[c])).det().unwrap();
        let combo = replaced(&|c| m[(1, c)].clone() * rat(k) + rat(row[c])).det().unwrap();
        prop_assert_eq!(combo, base.clone() * rat(k) + other);
        prop_assert_eq!(m.det_laplace().unwrap(), base);
    }

    #[test]
    fn roots_reexpand(roots in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..6)) {
        let zs: Vec<C> = roots.iter().map(|&(a, b)| C::new(a, b)).collect();
        // well separated roots keep the comparison meaningful
        for i in 0..zs.len() {
            for j in 0..i {
                prop_assume!((zs[i] - zs[j]).norm() > 0.2);
            }
        }
        let p = Poly::from_roots(&zs);
        let q = Poly::from_roots(&poly_roots(&p).unwrap());
        for k in 0..=zs.len() {
            prop_assert!((p.coeff(k) - q.coeff(k)).norm() <= 1e-8 * (1.0 + p.max_magnitude()));
        }
    }

    #[test]
    fn bipoly_divides_by_linear_factor(f in bipoly_strategy()) {
        let lin = BiPoly::monomial(rat(1), 1, 0) - BiPoly::monomial(rat(1), 0, 1);
        let product = f.clone() * lin;
        prop_assert_eq!(product.div_linear(LinearFactor::UMinusV).unwrap(), f.clone());
        prop_assert_eq!(product.div_linear(LinearFactor::VMinusU).unwrap(), -f);
    }

    #[test]
    fn no_shape_mismatch((nn, n) in shape_strategy(), seed in any::<u64>()) {
        let m = sample_m::<Rational>(nn, n, seed).unwrap();
        prop_assert!(m.check_shape().is_ok());
        if let Ok(l) = gauge_fix_l(&m) {
            prop_assert!(l.check_shape().is_ok());
            prop_assert_eq!(char_poly_t(&l).unwrap(), char_poly_t(&m).unwrap());
        }
    }

    #[test]
    fn generator_counts((nn, n) in shape_strategy()) {
        let count = |r| generator_degrees(r, nn, n).unwrap().len();
        prop_assert_eq!(count(RingId::A), count(RingId::F) + count(RingId::D));
        prop_assert_eq!(count(RingId::D), genus(nn, n).unwrap());
    }

    #[test]
    fn lax_json_roundtrip((nn, n) in shape_strategy(), seed in any::<u64>()) {
        let m = sample_m::<C>(nn, n, seed).unwrap();
        prop_assert_eq!(lax_from_json::<C>(&lax_to_json(&m)).unwrap(), m.clone());
        let exact = sample_m::<Rational>(nn, n, seed).unwrap();
        prop_assert_eq!(lax_from_json::<Rational>(&lax_to_json(&exact)).unwrap(), exact.clone());
        let curve = char_poly_t(&exact).unwrap();
        prop_assert_eq!(curve_from_json::<Rational>(&curve_to_json(&curve)).unwrap(), curve);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn jacobi_on_random_triples((nn, n) in (2usize..=3, 1usize..=2), seed in any::<u64>()) {
        let p = structure_constants(nn, n).unwrap();
        prop_assert!(p.is_antisymmetric());
        prop_assert_eq!(jacobi_failures(&p, &random_triples(p.dim(), 200, seed)), 0);
    }

    #[test]
    fn d_is_graded_derivation(
        (nn, n) in (2usize..=3, 2usize..=2),
        u in any::<prop::sample::Index>(),
        v in any::<prop::sample::Index>(),
        pick in any::<prop::sample::Index>(),
    ) {
        let p = structure_constants(nn, n).unwrap();
        let grades = m_grade(nn, n);
        let (u, v) = (u.index(p.dim()), v.index(p.dim()));
        let pairs: Vec<(usize, usize)> = (1..nn).flat_map(|k| (1..n * k).map(move |i| (i, k))).collect();
        let (i, k) = pairs[pick.index(pairs.len())];
        let (x, y) = (MPoly::<Rational>::var(u), MPoly::<Rational>::var(v));
        let lhs = apply_d(&p, i, k, &(x.clone() * y.clone())).unwrap();
        let rhs = apply_d(&p, i, k, &x).unwrap() * y.clone() + x.clone() * apply_d(&p, i, k, &y).unwrap();
        prop_assert_eq!(lhs.clone(), rhs);
        let weight = |w: usize| grades[w];
        let degs = lhs.weighted_degrees(weight);
        prop_assert!(degs.len() <= 1);
        if let Some(&d) = degs.first() {
            prop_assert_eq!(d, grades[u] + grades[v] + d_degree(nn, n, i, k));
        }
    }

    #[test]
    fn w_is_independent_of_xi((nn, n) in (3usize..=4, 1usize..=3), seed in 0u64..1000, alt in any::<u64>()) {
        let m = sample_m::<C>(nn, n, seed).unwrap();
        let Ok(d) = separate(&m, seed) else { return Ok(()) };
        let split = BlockSplit::from_matrix(m.entries());
        for p in &d.points {
            let Ok(xi) = choose_xi(&split, p.z, alt) else { continue };
            let w = w_formula(&split.map(|q| q.eval(&p.z)), &xi.xi).unwrap();
            prop_assert!((w - p.w).norm() <= 1e-7 * p.w.norm().max(1.0));
        }
    }

    #[test]
    fn divisor_json_roundtrip((nn, n) in (2usize..=3, 1usize..=3), seed in 0u64..1000) {
        let m = sample_m::<C>(nn, n, seed).unwrap();
        let Ok(d) = separate(&m, seed) else { return Ok(()) };
        let text = serde_json::to_string(&d).unwrap();
        prop_assert_eq!(serde_json::from_str::<Divisor>(&text).unwrap(), d);
    }
}
