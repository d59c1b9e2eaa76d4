//! Certified lower bounds for local stability thresholds and their
//! equality-case classification.
//!
//! The stability threshold itself is an infimum over all valuations and is
//! never computed here: every report is an exact lower bound
//! `lambda = 3 eps / L^2` on a surface (lifted to `(n+1) eps / L^n` in
//! higher dimension), together with the per-ray upper certificate
//! `A(E)/S(E)` and the inequality chain backing the bound. Equality cases
//! are classified by exact lattice predicates only (`eps = tau`,
//! `eps^2 = L^2`, proportionality `L = tau C`); the valuation-theoretic
//! clauses attached to those cases are recorded as textual notes on the
//! report, not verified.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ns_lattice::{CurveEntry, DivClass, PointModel, SurfaceModel};
use crate::rat::Rat;
use crate::rayscan::{RayInvariants, RayScan};

/// Equality classification of the surface bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum EqualityClass {
    /// No exact equality witness: the bound is reported as strict modulo
    /// the non-lattice clauses noted on the report.
    Strict,
    /// `eps = tau = sqrt(L^2)` exactly.
    EpsTauSqrt { value: Rat },
    /// `eps tau = L^2` and a cataloged irreducible curve with `L = tau C`
    /// through the point.
    UniqueCurve {
        curve: String,
        class: DivClass,
        tau: Rat,
    },
    /// The catalog is not known complete, so the thresholds are only
    /// bounded and no classification is certified.
    Undecided,
}

/// The exact inequalities backing a surface report. Their failure is an
/// internal error, never a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub s_plus_fixed_deg: Rat,
    pub two_over_lambda: Rat,
    /// `S + deg F <= 2 / lambda` held (always true in emitted reports).
    pub s_plus_fixed_le_two_over_lambda: bool,
    /// Whether that inequality is an exact equality.
    pub chain_equality: bool,
    /// Per-ray upper certificate `A(E) / S(L;E)`.
    pub log_disc_over_s: Rat,
    pub log_disc_over_s_ge_lambda: bool,
    /// `(lambda/2)(S + deg F) <= 1` held.
    pub half_lambda_times_s_plus_fixed_le_one: bool,
}

/// A named class or value backing the classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<DivClass>,
    pub note: String,
}

/// Full surface report: ray invariants, the lower bound, the verified
/// chain, the equality classification and its witnesses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub surface: String,
    pub ample: DivClass,
    pub ray: RayInvariants,
    pub lambda_bound: Rat,
    pub chain: ChainRecord,
    pub equality_class: EqualityClass,
    pub witnesses: Vec<Witness>,
    /// False when any involved catalog is not known complete; the bound is
    /// then an upper approximation of the thresholds only.
    pub trust: bool,
}

/// Lower bound `lambda = 3 eps / L^2` for the local stability threshold of
/// an ample class on a surface, with the proof chain verified exactly and
/// the equality case classified.
pub fn surface_delta_bound(
    s: &SurfaceModel,
    l: &DivClass,
    pm: &PointModel,
) -> Result<InvariantReport> {
    if pm.base != *s {
        return Err(Error::Domain(
            "point model was not built over the given surface".into(),
        ));
    }
    let scan = RayScan::over_point(pm, l)?;
    let ray = scan.invariants()?;
    let l_sq = scan.l_square().clone();
    let lambda = Rat::int(3) * &ray.eps / &l_sq;
    let chain = verify_chain(&ray, &lambda)?;
    let trust = s.catalog_complete && pm.blown.catalog_complete;

    let mut witnesses = Vec::new();
    let equality_class = if !trust {
        witnesses.push(Witness {
            name: "incomplete catalog".into(),
            class: None,
            note: "thresholds are upper bounds only; no equality classification is certified"
                .into(),
        });
        EqualityClass::Undecided
    } else if ray.eps == ray.tau && &ray.eps * &ray.eps == l_sq {
        witnesses.push(Witness {
            name: "eps = tau = sqrt(L^2)".into(),
            class: None,
            note: format!(
                "equality case: eps = tau = {} with eps^2 = L^2 = {l_sq}; at this value the \
                 bound is attained by the exceptional ray itself",
                ray.eps
            ),
        });
        EqualityClass::EpsTauSqrt {
            value: ray.eps.clone(),
        }
    } else if &ray.eps * &ray.tau == l_sq {
        match find_unique_tau_divisor(pm, l, &ray.eta, &ray.tau) {
            Some((curve, tau)) => {
                witnesses.push(Witness {
                    name: curve.name.clone(),
                    class: Some(curve.cls.clone()),
                    note: format!(
                        "L = {tau} * [{}] exactly; any effective D ~ L with multiplicity \
                         v(D) > {} at the point contains ((v(D) - {})/({tau} - {})) times this \
                         curve",
                        curve.name, ray.eta, ray.eta, ray.eta
                    ),
                });
                EqualityClass::UniqueCurve {
                    curve: curve.name.clone(),
                    class: curve.cls,
                    tau,
                }
            }
            None => {
                witnesses.push(Witness {
                    name: "eps * tau = L^2 without curve witness".into(),
                    class: None,
                    note: "no cataloged curve satisfies L = tau C through the point; equality \
                           would additionally require such a curve to exist"
                        .into(),
                });
                EqualityClass::Strict
            }
        }
    } else {
        EqualityClass::Strict
    };

    Ok(InvariantReport {
        surface: s.name.clone(),
        ample: l.clone(),
        ray,
        lambda_bound: lambda,
        chain,
        equality_class,
        witnesses,
        trust,
    })
}

fn verify_chain(ray: &RayInvariants, lambda: &Rat) -> Result<ChainRecord> {
    let s_plus_fixed = &ray.s_inv + &ray.fixed_deg;
    let two_over_lambda = Rat::int(2) / lambda;
    if s_plus_fixed > two_over_lambda {
        return Err(Error::Internal(format!(
            "chain failure: S + deg F = {s_plus_fixed} exceeds 2/lambda = {two_over_lambda}"
        )));
    }
    let a_over_s = &ray.log_discrepancy / &ray.s_inv;
    if &a_over_s < lambda {
        return Err(Error::Internal(format!(
            "chain failure: A(E)/S = {a_over_s} below lambda = {lambda}"
        )));
    }
    let half = lambda / &Rat::int(2) * &s_plus_fixed;
    if half > Rat::one() {
        return Err(Error::Internal(
            "chain failure: (lambda/2)(S + deg F) exceeds 1".into(),
        ));
    }
    Ok(ChainRecord {
        chain_equality: s_plus_fixed == two_over_lambda,
        s_plus_fixed_deg: s_plus_fixed,
        two_over_lambda,
        s_plus_fixed_le_two_over_lambda: true,
        log_disc_over_s: a_over_s,
        log_disc_over_s_ge_lambda: true,
        half_lambda_times_s_plus_fixed_le_one: true,
    })
}

/// Picard-rank-one specialization: the bound `3 / tau`, which must agree
/// exactly with `3 eps / L^2` since `eps tau = L^2` on such surfaces.
pub fn corollary_rho1_bound(
    s: &SurfaceModel,
    l: &DivClass,
    pm: &PointModel,
) -> Result<InvariantReport> {
    if s.rank != 1 {
        return Err(Error::Domain(format!(
            "Picard-rank-one bound needs rank 1, got {}",
            s.rank
        )));
    }
    let mut report = surface_delta_bound(s, l, pm)?;
    let three_over_tau = Rat::int(3) / &report.ray.tau;
    if three_over_tau != report.lambda_bound {
        return Err(Error::Internal(format!(
            "rank-one consistency 3/tau = 3 eps / L^2 failed: {three_over_tau} vs {}",
            report.lambda_bound
        )));
    }
    report.witnesses.push(Witness {
        name: "rank-one cross-check".into(),
        class: None,
        note: format!("3/tau = {three_over_tau} agrees exactly with 3 eps / L^2 (eps tau = L^2)"),
    });
    Ok(report)
}

/// Searches the base catalog for the unique curve with `L = tau C` passing
/// through the modeled point (positive multiplicity read from its strict
/// transform). Returns nothing when `eta = tau`: no high-multiplicity
/// divisor is then distinguished.
pub fn find_unique_tau_divisor(
    pm: &PointModel,
    l: &DivClass,
    eta: &Rat,
    tau: &Rat,
) -> Option<(CurveEntry, Rat)> {
    if eta >= tau {
        return None;
    }
    for entry in &pm.base.curves {
        if entry.cls.scale(tau) == *l {
            if let Some(mult) = pm.catalog_multiplicity(&entry.cls) {
                if mult.is_positive() {
                    return Some((entry.clone(), tau.clone()));
                }
            }
        }
    }
    None
}

/// Equality trichotomy of the dimension lift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Trichotomy {
    /// `eps = tau = sqrt(L^n) = 1`: the bound is attained by every member
    /// of the linear system through the point.
    Case1UnitSqrt,
    /// `eps = tau = sqrt(L^n) > 1`: any valuation attaining the bound has
    /// center of dimension at least `n - 2`.
    Case2BigSqrtCenterDim,
    /// `eps tau = L^n` with `eps < tau`: any valuation attaining the bound
    /// is divisorial, induced by a prime divisor `G` with `L = tau G`.
    Case3DivisorProportional,
    Strict,
}

/// Dimension lift: `delta >= (n+1) eps / L^n` from the surface data,
/// with the equality trichotomy decided by exact tests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftReport {
    pub n: u32,
    pub ln: Rat,
    pub eps_surface: Rat,
    pub tau_surface: Rat,
    pub delta_bound: Rat,
    pub trichotomy: Trichotomy,
}

pub fn lift_dimension(n: u32, ln: &Rat, eps: &Rat, tau: &Rat) -> Result<LiftReport> {
    if n < 2 {
        return Err(Error::Domain("dimension must be at least 2".into()));
    }
    if !ln.is_positive() {
        return Err(Error::Domain("L^n must be positive".into()));
    }
    if !eps.is_positive() || eps > tau {
        return Err(Error::Domain("need 0 < eps <= tau".into()));
    }
    let delta_bound = Rat::int(n as i64 + 1) * eps / ln;
    let eps_sq = eps * eps;
    let trichotomy = if eps == tau && &eps_sq == ln {
        if *eps == Rat::one() {
            Trichotomy::Case1UnitSqrt
        } else if *eps > Rat::one() {
            Trichotomy::Case2BigSqrtCenterDim
        } else {
            Trichotomy::Strict
        }
    } else if &(eps * tau) == ln && eps < tau {
        Trichotomy::Case3DivisorProportional
    } else {
        Trichotomy::Strict
    };
    Ok(LiftReport {
        n,
        ln: ln.clone(),
        eps_surface: eps.clone(),
        tau_surface: tau.clone(),
        delta_bound,
        trichotomy,
    })
}

/// Upper bound for the expected vanishing order along a prime divisor:
/// `S(L;G) <= L^n / ((n+1) L^{n-1}.G)`, with equality iff `L = aG`;
/// the proportionality is supplied by the caller when class data exists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorSBound {
    pub bound: Rat,
    pub equality: Option<bool>,
}

pub fn divisor_s_bound(
    n: u32,
    ln: &Rat,
    ln_g: &Rat,
    proportional: Option<bool>,
) -> Result<DivisorSBound> {
    if n < 1 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    if !ln.is_positive() {
        return Err(Error::Domain("L^n must be positive".into()));
    }
    if !ln_g.is_positive() {
        return Err(Error::Domain(
            "intersection L^{n-1}.G must be positive".into(),
        ));
    }
    Ok(DivisorSBound {
        bound: ln / &(Rat::int(n as i64 + 1) * ln_g),
        equality: proportional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ns_lattice::{blow_up, builtin_surface, BuiltinSpec, ExplicitTransform, PointSpec};
    use crate::rat::rat;
    use crate::rayscan::RayScan;

    fn general_blowup(spec: BuiltinSpec) -> (SurfaceModel, PointModel) {
        let s = builtin_surface(&spec).unwrap();
        let pm = blow_up(&s, &PointSpec::General).unwrap();
        (s, pm)
    }

    #[test]
    fn p2_report() {
        let (s, pm) = general_blowup(BuiltinSpec::P2);
        let r = surface_delta_bound(&s, &DivClass::from_ints(&[1]), &pm).unwrap();
        assert_eq!(r.lambda_bound, Rat::int(3));
        assert_eq!(
            r.equality_class,
            EqualityClass::EpsTauSqrt { value: Rat::one() }
        );
        // eps * tau = L^2 exactly
        assert_eq!(&r.ray.eps * &r.ray.tau, Rat::one());
        assert!(r.trust);
    }

    #[test]
    fn p1xp1_report() {
        let (s, pm) = general_blowup(BuiltinSpec::P1xP1);
        let r = surface_delta_bound(&s, &DivClass::from_ints(&[1, 1]), &pm).unwrap();
        assert_eq!(r.lambda_bound, rat(3, 2));
        assert_eq!(r.equality_class, EqualityClass::Strict);
        // chain equality: S + deg F = 4/3 = 2/lambda
        assert_eq!(r.chain.s_plus_fixed_deg, rat(4, 3));
        assert_eq!(r.chain.two_over_lambda, rat(4, 3));
        assert!(r.chain.chain_equality);
        // A(E)/S = 2, the known threshold for bidegree (1,1)
        assert_eq!(r.chain.log_disc_over_s, Rat::int(2));
    }

    #[test]
    fn dp3_report() {
        let (s, pm) = general_blowup(BuiltinSpec::DelPezzo(3));
        let r = surface_delta_bound(&s, &s.canonical.neg(), &pm).unwrap();
        assert_eq!(r.lambda_bound, rat(3, 2));
        assert_eq!(r.equality_class, EqualityClass::Strict);
        assert_eq!(r.chain.log_disc_over_s, rat(12, 7));
        assert!(r.chain.log_disc_over_s >= rat(3, 2));
    }

    #[test]
    fn rho1_bound_and_scaling() {
        let (s, pm) = general_blowup(BuiltinSpec::P2);
        let r1 = corollary_rho1_bound(&s, &DivClass::from_ints(&[1]), &pm).unwrap();
        assert_eq!(r1.lambda_bound, Rat::int(3));
        // O(2): tau = 2, bound 3/2, cross-check 3 eps / L^2 = 6/4
        let r2 = corollary_rho1_bound(&s, &DivClass::from_ints(&[2]), &pm).unwrap();
        assert_eq!(r2.ray.tau, Rat::int(2));
        assert_eq!(r2.lambda_bound, rat(3, 2));
        // rank restriction
        let (pp, pm2) = general_blowup(BuiltinSpec::P1xP1);
        assert!(matches!(
            corollary_rho1_bound(&pp, &DivClass::from_ints(&[1, 1]), &pm2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn lambda_scaling_in_m() {
        // replacing L by mL scales eps, tau, S by m and divides lambda by m
        for spec in [BuiltinSpec::P1xP1, BuiltinSpec::DelPezzo(4)] {
            let (s, pm) = general_blowup(spec);
            let l = s.canonical.neg();
            let base = surface_delta_bound(&s, &l, &pm).unwrap();
            for m in [2i64, 3] {
                let scaled = surface_delta_bound(&s, &l.scale(&Rat::int(m)), &pm).unwrap();
                assert_eq!(scaled.ray.eps, &base.ray.eps * &Rat::int(m));
                assert_eq!(scaled.ray.tau, &base.ray.tau * &Rat::int(m));
                assert_eq!(scaled.ray.s_inv, &base.ray.s_inv * &Rat::int(m));
                assert_eq!(scaled.lambda_bound, &base.lambda_bound / &Rat::int(m));
            }
        }
    }

    #[test]
    fn unique_tau_divisor_cases() {
        // P1xP1 ray on (1,1): eta = 1 < tau = 2, no curve with (1,1) = tau C
        let (_, pm) = general_blowup(BuiltinSpec::P1xP1);
        let l = DivClass::from_ints(&[1, 1]);
        let scan = RayScan::over_point(&pm, &l).unwrap();
        let inv = scan.invariants().unwrap();
        assert!(find_unique_tau_divisor(&pm, &l, &inv.eta, &inv.tau).is_none());

        // degenerate eta = tau returns nothing by precondition
        let (_, pm) = general_blowup(BuiltinSpec::P2);
        let l3 = DivClass::from_ints(&[3]);
        let scan = RayScan::over_point(&pm, &l3).unwrap();
        let (eps, eta, tau) = scan.thresholds().unwrap();
        assert_eq!(eps, Rat::int(3));
        assert_eq!(eta, tau);
        assert!(find_unique_tau_divisor(&pm, &l3, &eta, &tau).is_none());
    }

    #[test]
    fn unique_tau_divisor_constructed_witness() {
        // rank-one model carrying a curve entry C with L = tau C, whose
        // strict transform C - 2E (a curve of multiplicity 2 at the point)
        // stays in the blown catalog with self-intersection -3
        let s = SurfaceModel::new(
            "synthetic-rho1",
            vec!["H".into()],
            vec![vec![Rat::one()]],
            DivClass::from_ints(&[-3]),
            DivClass::from_ints(&[1]),
            vec![("C".into(), DivClass::from_ints(&[1]), Some(0))],
            true,
        )
        .unwrap();
        let pm = blow_up(
            &s,
            &PointSpec::Explicit {
                transforms: vec![ExplicitTransform {
                    name: "C~".into(),
                    cls: DivClass::from_ints(&[1, -2]),
                    mult: Rat::int(2),
                }],
                catalog_complete: true,
            },
        )
        .unwrap();
        assert_eq!(
            pm.catalog_multiplicity(&DivClass::from_ints(&[1])),
            Some(Rat::int(2))
        );
        let l = DivClass::from_ints(&[2]); // L = 2C
        let found = find_unique_tau_divisor(&pm, &l, &Rat::one(), &Rat::int(2));
        let (curve, tau) = found.expect("constructed witness found");
        assert_eq!(curve.name, "C");
        assert_eq!(tau, Rat::int(2));
    }

    #[test]
    fn lift_examples() {
        // quartic threefold surface section: eps = tau = 2, L^3 = 4
        let r = lift_dimension(3, &Rat::int(4), &Rat::int(2), &Rat::int(2)).unwrap();
        assert_eq!(r.delta_bound, Rat::int(2));
        assert_eq!(r.trichotomy, Trichotomy::Case2BigSqrtCenterDim);

        // degree-one section: eps = 1/2, tau = 2, L^3 = 1
        let r = lift_dimension(3, &Rat::one(), &rat(1, 2), &Rat::int(2)).unwrap();
        assert_eq!(r.delta_bound, Rat::int(2));
        assert_eq!(r.trichotomy, Trichotomy::Case3DivisorProportional);

        // unit square case
        let r = lift_dimension(2, &Rat::one(), &Rat::one(), &Rat::one()).unwrap();
        assert_eq!(r.delta_bound, Rat::int(3));
        assert_eq!(r.trichotomy, Trichotomy::Case1UnitSqrt);

        // parameter validation
        assert!(lift_dimension(1, &Rat::one(), &Rat::one(), &Rat::one()).is_err());
        assert!(lift_dimension(3, &Rat::one(), &Rat::int(3), &Rat::int(2)).is_err());
    }

    #[test]
    fn trichotomy_exclusive_given_threshold_chain() {
        // for eps <= sqrt(L^n) <= tau at most one equality predicate fires
        let cases = [
            (Rat::one(), Rat::one(), Rat::one()),
            (Rat::int(2), Rat::int(2), Rat::int(4)),
            (rat(1, 2), Rat::int(2), Rat::one()),
            (Rat::one(), Rat::int(2), Rat::int(3)),
        ];
        for (eps, tau, ln) in cases {
            let case1 = eps == tau && &eps * &eps == ln && eps == Rat::one();
            let case2 = eps == tau && &eps * &eps == ln && eps > Rat::one();
            let case3 = &eps * &tau == ln && eps < tau;
            assert!(
                [case1, case2, case3].iter().filter(|&&b| b).count() <= 1,
                "eps={eps} tau={tau} ln={ln}"
            );
        }
    }

    #[test]
    fn divisor_bound_examples() {
        // P2 with G = line: bound 1/3, equality since L = G
        let b = divisor_s_bound(2, &Rat::one(), &Rat::one(), Some(true)).unwrap();
        assert_eq!(b.bound, rat(1, 3));
        assert_eq!(b.equality, Some(true));
        // matches the exact ray computation S(O(1); line) = 1/3
        let p2 = builtin_surface(&BuiltinSpec::P2).unwrap();
        let scan =
            RayScan::along_curve(&p2, &DivClass::from_ints(&[1]), &DivClass::from_ints(&[1]))
                .unwrap();
        assert_eq!(scan.s_invariant().unwrap(), b.bound);

        // degree-16 threefold with D ~ rH: S(H;D) <= 1/(4r)
        for r in 1..=3i64 {
            let b = divisor_s_bound(3, &Rat::int(16), &Rat::int(16 * r), None).unwrap();
            assert_eq!(b.bound, Rat::one() / Rat::int(4 * r));
        }

        // n = 1: bound = L / (2 L.G)
        let b = divisor_s_bound(1, &Rat::int(6), &Rat::int(3), Some(true)).unwrap();
        assert_eq!(b.bound, Rat::one());

        assert!(divisor_s_bound(2, &Rat::one(), &Rat::zero(), None).is_err());
    }

    #[test]
    fn product_surface_rank_one_bound_fails() {
        // 3/tau exceeds the known threshold 2/b whenever b > 2a: for
        // bidegree (1,3), 3/tau = 3/4 > 2/3
        let (_, pm) = general_blowup(BuiltinSpec::P1xP1);
        for (a, b) in [(1i64, 3i64), (1, 4), (2, 5)] {
            let l = DivClass::from_ints(&[a, b]);
            let scan = RayScan::over_point(&pm, &l).unwrap();
            let tau = scan.tau();
            assert_eq!(tau, Rat::int(a + b));
            let three_over_tau = Rat::int(3) / &tau;
            let two_over_b = Rat::int(2) / Rat::int(b);
            assert!(b > 2 * a);
            assert!(three_over_tau > two_over_b, "(a,b)=({a},{b})");
        }
    }

    #[test]
    fn report_round_trips_as_json() {
        let (s, pm) = general_blowup(BuiltinSpec::DelPezzo(3));
        let r = surface_delta_bound(&s, &s.canonical.neg(), &pm).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        let back: InvariantReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn undecided_on_incomplete_catalog() {
        let s = SurfaceModel::new(
            "user-surface",
            vec!["H".into()],
            vec![vec![Rat::one()]],
            DivClass::from_ints(&[-3]),
            DivClass::from_ints(&[1]),
            vec![],
            false,
        )
        .unwrap();
        let pm = blow_up(
            &s,
            &PointSpec::Explicit {
                transforms: vec![],
                catalog_complete: false,
            },
        )
        .unwrap();
        let r = surface_delta_bound(&s, &DivClass::from_ints(&[1]), &pm).unwrap();
        assert_eq!(r.equality_class, EqualityClass::Undecided);
        assert!(!r.trust);
    }
}
