//! Property suites for the lattice and decomposition invariants: pairing
//! bilinearity, the projection formula under blowups, and the structural
//! guarantees of the Zariski decomposition on random pseudo-effective
//! classes.

use proptest::prelude::*;

use fano_core::ns_lattice::{
    blow_up, builtin_surface, BuiltinSpec, DivClass, PointSpec, SurfaceModel,
};
use fano_core::rat::Rat;
use fano_core::zariski::{is_nef, is_pseudoeffective, zariski_decompose};

fn rat_strategy() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=12).prop_map(|(p, q)| Rat::new(p, q))
}

fn class_strategy(rank: usize) -> impl Strategy<Value = DivClass> {
    prop::collection::vec(rat_strategy(), rank).prop_map(DivClass)
}

fn dp5() -> SurfaceModel {
    builtin_surface(&BuiltinSpec::DelPezzo(5)).expect("builtin")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_symmetric_and_bilinear(
        d1 in class_strategy(5),
        d2 in class_strategy(5),
        d3 in class_strategy(5),
        a in rat_strategy(),
        b in rat_strategy(),
    ) {
        let s = dp5();
        prop_assert_eq!(s.pair(&d1, &d2), s.pair(&d2, &d1));
        let lin = d1.scale(&a).add(&d2.scale(&b));
        prop_assert_eq!(
            s.pair(&lin, &d3),
            &a * &s.pair(&d1, &d3) + &b * &s.pair(&d2, &d3)
        );
    }

    #[test]
    fn projection_formula(d1 in class_strategy(5), d2 in class_strategy(5)) {
        let s = dp5();
        let pm = blow_up(&s, &PointSpec::General).expect("blowup");
        let u1 = pm.pullback(&d1).unwrap();
        let u2 = pm.pullback(&d2).unwrap();
        prop_assert_eq!(pm.blown.pair(&u1, &u2), s.pair(&d1, &d2));
        prop_assert_eq!(pm.blown.pair(&u1, &pm.exceptional), Rat::zero());
    }

    #[test]
    fn zariski_reconstruction_on_effective_classes(
        coeffs in prop::collection::vec((0u8..=3, 1i64..=6, 1i64..=4), 1..5),
        amp in 0i64..=2,
    ) {
        // random nonnegative combinations of catalog curves plus a nef part
        // are pseudo-effective by construction
        let s = builtin_surface(&BuiltinSpec::DelPezzo(4)).unwrap();
        let pm = blow_up(&s, &PointSpec::General).unwrap();
        let blown = &pm.blown;
        let curves: Vec<_> = blown.negative_curves().collect();
        let mut d = blown.ample_ref.scale(&Rat::int(amp));
        for (pick, p, q) in coeffs {
            let c = curves[(pick as usize * 7) % curves.len()];
            d = d.add(&c.cls.scale(&Rat::new(p, q)));
        }
        prop_assert!(is_pseudoeffective(&d, blown).unwrap());
        let z = zariski_decompose(&d, blown).unwrap();
        // exact reconstruction
        prop_assert_eq!(z.positive.add(&z.negative_part(blown.rank)), d);
        // positive part is nef and orthogonal to the support
        prop_assert!(is_nef(&z.positive, blown).unwrap());
        for (c, a) in &z.negative_support {
            prop_assert!(a.is_positive());
            prop_assert_eq!(blown.pair(&z.positive, &c.cls), Rat::zero());
        }
        // negative-definiteness certificate: minors alternate in sign
        prop_assert!(z.certificate.signs_alternate());
        // volume is nonnegative
        prop_assert!(!z.volume(blown).is_negative());
    }
}

#[test]
fn all_builtin_signatures_validate() {
    let mut specs = vec![BuiltinSpec::P2, BuiltinSpec::P1xP1];
    specs.extend((0..=4).map(BuiltinSpec::Hirzebruch));
    specs.extend((1..=9).map(BuiltinSpec::DelPezzo));
    specs.extend((0..=8).map(BuiltinSpec::BlowupP2));
    for spec in specs {
        // construction re-validates the (1, rank-1) signature exactly
        let s = builtin_surface(&spec).unwrap_or_else(|e| panic!("{spec:?}: {e}"));
        assert!(s.rank >= 1);
        assert!(s.self_int(&s.ample_ref).is_positive());
    }
}

#[test]
fn nonzero_nef_classes_are_pseudoeffective() {
    let s = builtin_surface(&BuiltinSpec::DelPezzo(6)).unwrap();
    let pm = blow_up(&s, &PointSpec::General).unwrap();
    let blown = &pm.blown;
    for c in blown.curves.iter() {
        // each catalog curve is effective, hence pseudo-effective
        assert!(is_pseudoeffective(&c.cls, blown).unwrap(), "{}", c.name);
    }
    assert!(is_pseudoeffective(&DivClass::zero(blown.rank), blown).unwrap());
}
