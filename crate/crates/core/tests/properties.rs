mod common;

use std::sync::OnceLock;

use common::{oracle_tet, x};
use dehnscope::filling::{choose_rs, filled_index_with_rs};
use dehnscope::gluing::GluingData;
use dehnscope::symplectic::{complete, matmul, verify, IntMatrix};
use dehnscope::{filled_index, tet_index, FillOptions, HalfExp, Manifold, Slope, TruncatedSeries};
use proptest::prelude::*;

fn any_series() -> impl Strategy<Value = TruncatedSeries> {
    (-6i64..6, prop::collection::vec(-9i64..9, 0..10), 0i64..24).prop_map(|(min, coeffs, cutoff)| {
        TruncatedSeries::new(HalfExp::from_twice(min), coeffs, HalfExp::from_twice(cutoff))
    })
}

fn manifolds() -> &'static [Manifold; 3] {
    static CELL: OnceLock<[Manifold; 3]> = OnceLock::new();
    CELL.get_or_init(|| {
        ["4_1", "5_2", "m003"].map(|name| Manifold::builtin(name).unwrap())
    })
}

fn coprime_slope(max: i64) -> impl Strategy<Value = Slope> {
    (-max..=max, -max..=max).prop_filter_map("coprime", |(p, q)| Slope::new(p, q).ok())
}

/// A random element of Sp(2k, Z) as a product of block generators.
fn symplectic_matrix(k: usize) -> impl Strategy<Value = IntMatrix> {
    let step = (0u8..3, prop::collection::vec(-2i64..=2, k * k));
    prop::collection::vec(step, 1..6).prop_map(move |steps| {
        let n = 2 * k;
        let mut g: IntMatrix = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        for (kind, vals) in steps {
            let mut h: IntMatrix = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
            match kind {
                0 | 1 => {
                    // symmetric off-diagonal block
                    for i in 0..k {
                        for j in i..k {
                            let v = vals[i * k + j];
                            let (r, c) = if kind == 0 { (i, k + j) } else { (k + i, j) };
                            let (r2, c2) = if kind == 0 { (j, k + i) } else { (k + j, i) };
                            h[r][c] = v;
                            h[r2][c2] = v;
                        }
                    }
                }
                _ => {
                    // U = I + t E_ab on the first block, U^-T on the second
                    let (a, b) = (vals[0].unsigned_abs() as usize % k, vals[1].unsigned_abs() as usize % k);
                    if a != b {
                        let t = vals[2];
                        h[a][b] = t;
                        h[k + b][k + a] = -t;
                    }
                }
            }
            g = matmul(&h, &g);
        }
        g
    })
}

proptest! {
    #[test]
    fn addition_commutes_and_cancels(a in any_series(), b in any_series()) {
        prop_assert_eq!(&a + &b, &b + &a);
        let d = &(&a + &b) - &b;
        prop_assert!(d.agrees_through(&a, a.cutoff().min(b.cutoff())));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn multiplication_is_a_ring(a in any_series(), b in any_series(), c in any_series()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn monomials_multiply_exponents(s in -20i64..20, t in -20i64..20) {
        let p = &TruncatedSeries::monomial(1, HalfExp::from_twice(s)) * &TruncatedSeries::monomial(-1, HalfExp::from_twice(t));
        prop_assert_eq!(p, TruncatedSeries::monomial(-1, HalfExp::from_twice(s + t)));
    }

    #[test]
    fn pochhammer_inverse_inverts(n in 0u32..=12, cutoff in 0i64..20) {
        let c = x(cutoff);
        let mut poch = TruncatedSeries::constant(1, HalfExp::EXACT);
        for k in 1..=n as i64 {
            let factor = &TruncatedSeries::constant(1, HalfExp::EXACT) - &TruncatedSeries::monomial(1, x(k));
            poch = &poch * &factor;
        }
        let one = poch.mul_upto(&TruncatedSeries::pochhammer_inverse(n, c), c);
        prop_assert_eq!(one, TruncatedSeries::constant(1, c));
    }

    #[test]
    fn tet_index_matches_oracle(m in -7i64..=7, e in -7i64..=7, twice in 0i64..12) {
        let c = HalfExp::from_twice(twice);
        prop_assert_eq!(tet_index(m, e, c), oracle_tet(m, e, c));
    }

    #[test]
    fn tet_index_cutoff_stable(m in -8i64..=8, e in -8i64..=8, lo in 0i64..12, extra in 0i64..8) {
        let lo = HalfExp::from_twice(lo);
        let hi = HalfExp::from_twice(lo.twice() + extra);
        prop_assert_eq!(tet_index(m, e, hi).truncate(lo), tet_index(m, e, lo));
    }

    #[test]
    fn half_exponents_round_trip(t in -1000i64..1000) {
        let h = HalfExp::from_twice(t);
        prop_assert_eq!(h.to_string().parse::<HalfExp>().unwrap(), h);
    }

    #[test]
    fn random_frames_complete(g in (2usize..=3).prop_flat_map(symplectic_matrix)) {
        prop_assume!(verify(&g));
        let k = g.len() / 2;
        let data = GluingData {
            name: "random".into(),
            k,
            a: (0..k).map(|i| g[i][..k].to_vec()).collect(),
            b: (0..k).map(|i| g[i][k..].to_vec()).collect(),
            c: g[k][..k].to_vec(),
            d: g[k][k..].to_vec(),
            nu: vec![0; k],
            two_nu_last: 0,
        };
        let frame = complete(&data).unwrap();
        prop_assert!(verify(&frame.g));
        prop_assert_eq!(&frame.g[..=k], &g[..=k]);
        prop_assert_eq!(matmul(&frame.g, frame.inverse()), matmul(&g, &dehnscope::symplectic::symplectic_inverse(&g)));
    }

    #[test]
    fn slope_canonical_is_idempotent(s in coprime_slope(20)) {
        let c = s.canonical();
        prop_assert_eq!(c.canonical(), c);
        prop_assert_eq!(Slope { p: -s.p, q: -s.q }.canonical(), c);
        prop_assert!(c.q > 0 || (c.q == 0 && c.p == 1));
        let (r, t) = choose_rs(s);
        prop_assert_eq!(s.q * r - s.p * t, 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cusped_z2_symmetry(which in 0usize..3, m in -3i64..=3, e in -3i64..=3) {
        let man = &manifolds()[which];
        let a = man.indexer.compute(m, e, x(5)).unwrap();
        let b = man.indexer.compute(-m, -e, x(5)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn cusped_cutoff_stable(which in 0usize..3, m in -3i64..=3, e in -3i64..=3, extra in 1i64..4) {
        let man = &manifolds()[which];
        let lo = man.indexer.compute(m, e, x(4)).unwrap();
        let hi = man.indexer.compute(m, e, HalfExp::from_twice(8 + extra)).unwrap();
        prop_assert_eq!(hi.truncate(x(4)), lo);
    }

    #[test]
    fn filling_shift_and_sign(which in 0usize..2, s in coprime_slope(5), k in -3i64..=3) {
        let man = &manifolds()[which];
        let opts = FillOptions::default();
        let rs = choose_rs(s);
        let a = filled_index_with_rs(&man.indexer, s, rs, x(4), opts).unwrap();
        let b = filled_index_with_rs(&man.indexer, s, (rs.0 + k * s.p, rs.1 + k * s.q), x(4), opts).unwrap();
        prop_assert_eq!((a.status, &a.series), (b.status, &b.series));
        let c = filled_index(&man.indexer, Slope { p: -s.p, q: -s.q }, x(4), opts).unwrap();
        prop_assert_eq!((a.status, &a.series), (c.status, &c.series));
    }
}
