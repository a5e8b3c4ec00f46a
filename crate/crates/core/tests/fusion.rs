use tlforge::catalog::{n_r_plus_1, q2_block, q2_tensor, q_sqrt2, q_sqrt3, rank_one, trivial};
use tlforge::classify::{class_of, TlClass};
use tlforge::combinators::fuse;
use tlforge::{Complex64, Tolerance, DEFAULT_CAP};

#[test]
fn fusion_squares_q_and_rank() {
    let tol = Tolerance::default();
    let z = Complex64::new(1.3, -0.4);
    let items = vec![
        trivial(1).unwrap(),
        trivial(2).unwrap(),
        trivial(3).unwrap(),
        rank_one(2, z).unwrap(),
        rank_one(3, z).unwrap(),
        q_sqrt2().unwrap(),
        q_sqrt3().unwrap(),
        n_r_plus_1(2, z, Complex64::new(0.2, 0.0)).unwrap(),
        n_r_plus_1(3, z, Complex64::new(0.0, 1.0)).unwrap(),
        q2_block(2).unwrap(),
        q2_tensor(2, z).unwrap(),
    ];
    for inst in items {
        let sol = inst.verify(&tol).unwrap();
        let fused = fuse(&sol, DEFAULT_CAP, &tol).unwrap();
        let (n, r, q) = (sol.n(), sol.rank(), sol.q());
        assert_eq!(fused.n(), n * n, "{}", inst.label());
        assert_eq!(fused.rank(), r * r, "{}", inst.label());
        assert!((fused.q() - q * q).abs() < 1e-12);
        let tr = fused.t().trace().unwrap().re;
        assert!(
            (tr - q * q * (r * r) as f64).abs() < 1e-9,
            "{}: trace {tr}",
            inst.label()
        );
        assert_ne!(
            class_of(fused.n(), fused.rank(), fused.q(), 1e-9),
            TlClass::Excluded
        );
    }
}
