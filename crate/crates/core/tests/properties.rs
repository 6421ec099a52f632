use mflab::dilation::halmos_dilate;
use mflab::groups::FWord;
use mflab::matcore::{direct_sum, ginibre, haar_unitary_with, kron, op_norm, psd_sqrt, unitarity_defect};
use mflab::mfcheck::{ball_lower_bound, circle_norm};
use mflab::ncpoly::{format, parse, random_poly};
use mflab::par::task_rng;
use mflab::pvcrossed::truncated_shift;
use mflab::{CMatrix, MatTuple, NCPoly};
use proptest::prelude::*;

fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    (a - b).iter().all(|z| z.norm() <= tol * (1.0 + a.iter().map(|x| x.norm()).fold(0.0, f64::max)))
}

fn model(seed: u64, vars: usize, dim: usize) -> MatTuple {
    let mut rng = task_rng(seed, 99);
    MatTuple::new(dim, (0..vars).map(|_| ginibre(dim, dim, &mut rng) * mflab::C64::new(0.5, 0.0)).collect()).unwrap()
}

fn poly(seed: u64, task: u64, vars: u32) -> NCPoly {
    random_poly(&mut task_rng(seed, task), vars, 5, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn format_parse_round_trip(seed in any::<u64>(), vars in 1u32..4) {
        let p = poly(seed, 0, vars);
        prop_assert_eq!(parse(&format(&p), vars).unwrap(), p);
    }

    #[test]
    fn evaluation_is_a_star_homomorphism(seed in any::<u64>(), vars in 1u32..3, dim in 1usize..5) {
        let (p, q) = (poly(seed, 0, vars), poly(seed, 1, vars));
        let m = model(seed, vars as usize, dim);
        let (ep, eq) = (p.evaluate(&m).unwrap(), q.evaluate(&m).unwrap());
        prop_assert!(close(&p.mul(&q).evaluate(&m).unwrap(), &(&ep * &eq), 1e-10));
        prop_assert!(close(&p.add(&q).evaluate(&m).unwrap(), &(&ep + &eq), 1e-12));
        prop_assert!(close(&p.adjoint().evaluate(&m).unwrap(), &ep.adjoint(), 1e-12));
        prop_assert_eq!(p.adjoint().adjoint(), p);
    }

    #[test]
    fn evaluation_respects_direct_sums(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4) {
        let p = poly(seed, 0, 2);
        let (a, b) = (model(seed, 2, d1), model(seed ^ 1, 2, d2));
        let ab = MatTuple::direct_sum(&[a.clone(), b.clone()]).unwrap();
        let blocks = direct_sum(&[p.evaluate(&a).unwrap(), p.evaluate(&b).unwrap()]);
        prop_assert!(close(&p.evaluate(&ab).unwrap(), &blocks, 1e-12));
    }

    #[test]
    fn halmos_dilation_is_unitary(seed in any::<u64>(), dim in 1usize..16, keep in 1usize..16) {
        let mut rng = task_rng(seed, 0);
        let u = haar_unitary_with(dim + keep, &mut rng).unwrap();
        let a = u.view((0, 0), (dim, dim)).into_owned();
        let d = halmos_dilate(&a).unwrap();
        prop_assert!(unitarity_defect(&d) <= 1e-8);
        prop_assert!(close(&d.view((0, 0), (dim, dim)).into_owned(), &a, 1e-12));
    }

    #[test]
    fn norms_of_kron_and_sums(seed in any::<u64>(), d1 in 1usize..5, d2 in 1usize..5) {
        let mut rng = task_rng(seed, 0);
        let (a, b) = (ginibre(d1, d1, &mut rng), ginibre(d2, d2, &mut rng));
        let (na, nb) = (op_norm(&a).unwrap(), op_norm(&b).unwrap());
        prop_assert!((op_norm(&kron(&a, &b).unwrap()).unwrap() - na * nb).abs() <= 1e-10 * (1.0 + na * nb));
        prop_assert!((op_norm(&direct_sum(&[a.clone(), b.clone()])).unwrap() - na.max(nb)).abs() <= 1e-12 * (1.0 + na + nb));
        let pos = &a * a.adjoint();
        let r = psd_sqrt(&pos).unwrap();
        prop_assert!(close(&(&r * &r), &pos, 1e-10));
    }

    #[test]
    fn free_words_form_a_group(a in "[ab]{0,8}", b in "[ab]{0,8}", c in "[AB]{0,8}") {
        let word = |s: &str| -> FWord {
            let letters: Vec<(u32, i8)> = s.chars().map(|ch| match ch {
                'a' => (1, 1), 'b' => (2, 1), 'A' => (1, -1), _ => (2, -1),
            }).collect();
            FWord::reduce(&letters).unwrap()
        };
        let (x, y, z) = (word(&a), word(&b), word(&c));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert!(x.mul(&x.inv()).is_identity());
        prop_assert_eq!(x.mul(&y).inv(), y.inv().mul(&x.inv()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shift_compressions_stay_below_the_circle(c0 in -2i32..=2, c1 in -2i32..=2, c2 in -2i32..=2, n in 2usize..40) {
        let text = format!("({c0}) + ({c1})*X1 + ({c2})*X1'*X1'");
        let p = parse(&text, 1).unwrap();
        let t = MatTuple::new(n, vec![truncated_shift(n)]).unwrap();
        let model = op_norm(&p.evaluate(&t).unwrap()).unwrap();
        prop_assert!(model <= circle_norm(&p).unwrap() + 1e-8);
    }

    #[test]
    fn ball_bounds_respect_the_triangle_inequality(seed in any::<u64>()) {
        let p = random_poly(&mut task_rng(seed, 0), 2, 4, 2);
        let b = ball_lower_bound(&p, 2, 3).unwrap();
        let l1: f64 = p.terms().iter().map(|(_, c)| c.norm()).sum();
        prop_assert!(b.lower_bound <= l1 + 1e-9);
        let b4 = ball_lower_bound(&p, 2, 4).unwrap();
        prop_assert!(b4.lower_bound >= b.lower_bound - 1e-9);
    }
}
